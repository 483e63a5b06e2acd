//! Double description method for pointed polyhedral cones.
//!
//! Given constraint rows `A` of full column rank, computes the extreme rays
//! of `{x : A x >= 0}`. Adjacency of rays uses the combinatorial test.

use num_traits::{Signed, Zero};

use crate::linalg::{inverse, rank};
use crate::rational::{dot, primitive, Point, Rational};

#[derive(Clone)]
struct Ray {
    v: Point,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

/// Extreme rays of the pointed cone `{x : row · x >= 0 for all rows}`,
/// each scaled to primitive integers and sorted.
///
/// Panics if the rows do not have full column rank (the cone would not be
/// pointed); callers reduce to a chart first.
pub fn extreme_rays(rows: &[Point], dim: usize) -> Vec<Point> {
    assert!(dim > 0, "cone dimension must be positive");
    let words = rows.len().div_ceil(64).max(1);

    // Greedy choice of `dim` independent rows for the initial simplicial cone.
    let mut basis: Vec<usize> = Vec::new();
    let mut chosen: Vec<Point> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        chosen.push(r.clone());
        if rank(&chosen, dim) > basis.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    assert_eq!(basis.len(), dim, "constraint rows must have full column rank");

    let b: Vec<Point> = basis.iter().map(|&i| rows[i].clone()).collect();
    let inv = inverse(&b).expect("independent rows");
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let v: Point = primitive(&inv.iter().map(|row| row[j].clone()).collect::<Vec<_>>());
            let mut zeros = vec![0u64; words];
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    bit_set(&mut zeros, bi);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (k, r) in rays.iter().enumerate() {
            if vals[k].is_zero() {
                let mut r = r.clone();
                bit_set(&mut r.zeros, i);
                next.push(r);
            } else if vals[k].is_positive() {
                next.push(r.clone());
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common = and(&rays[p].zeros, &rays[n].zeros);
                if popcount(&common) + 2 < dim {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != n && is_subset(&common, &r.zeros));
                if blocked {
                    continue;
                }
                let v: Point = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp)
                    .collect();
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray { v: primitive(&v), zeros });
            }
        }
        rays = next;
    }

    let mut out: Vec<Point> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    out
}
