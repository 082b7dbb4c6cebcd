//! Brute-force reference implementations, deliberately written from the
//! definitions and sharing no code paths with the library.

#![allow(dead_code)]

use sbox_ga::SBox;

pub fn parity(v: usize) -> u32 {
    v.count_ones() & 1
}

/// Minimum Hamming distance from any nonzero component to any affine function.
pub fn nl_affine_distance(s: &SBox) -> u32 {
    let size = s.len();
    let mut best = u32::MAX;
    for b in 1..size {
        for a in 0..size {
            for c in 0..2 {
                let dist = (0..size)
                    .filter(|&x| parity(b & usize::from(s.apply(x))) != parity(a & x) ^ c)
                    .count() as u32;
                best = best.min(dist);
            }
        }
    }
    best
}

/// Walsh coefficient straight from the definition.
pub fn walsh_naive(s: &SBox, b: usize, a: usize) -> i64 {
    (0..s.len())
        .map(|x| {
            if parity(b & usize::from(s.apply(x))) ^ parity(a & x) == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// Double summation of `|W - offset|^exponent` with no fast transform.
pub fn whs_naive(s: &SBox, offset: i64, exponent: u32) -> u128 {
    let mut total = 0u128;
    for b in 1..s.len() {
        for a in 0..s.len() {
            total += ((walsh_naive(s, b, a) - offset).unsigned_abs() as u128).pow(exponent);
        }
    }
    total
}

/// Difference table by enumerating ordered input pairs.
pub fn ddt_pairs(s: &SBox) -> Vec<Vec<u32>> {
    let size = s.len();
    let mut t = vec![vec![0u32; size]; size];
    for x in 0..size {
        for y in 0..size {
            t[x ^ y][usize::from(s.apply(x) ^ s.apply(y))] += 1;
        }
    }
    t
}

pub fn delta_pairs(s: &SBox) -> u32 {
    ddt_pairs(s)[1..].iter().flatten().copied().max().unwrap()
}

/// ANF coefficients by the subset-sum definition: c[u] = XOR_{x subset of u} f(x).
pub fn anf_subsets(f: &[bool]) -> Vec<bool> {
    (0..f.len())
        .map(|u| (0..f.len()).filter(|&x| x & !u == 0).fold(false, |acc, x| acc ^ f[x]))
        .collect()
}

pub fn degree_subsets(s: &SBox) -> u32 {
    let mut best = 0;
    for v in 1..s.len() {
        let f: Vec<bool> = (0..s.len())
            .map(|x| parity(v & usize::from(s.apply(x))) == 1)
            .collect();
        let c = anf_subsets(&f);
        for (u, &on) in c.iter().enumerate() {
            if on {
                best = best.max(u.count_ones());
            }
        }
    }
    best
}

/// Textbook Gaussian elimination on unpacked rows.
pub fn rank_unpacked(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                for k in 0..cols {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Algebraic immunity by scanning monomial masks in numeric order and
/// checking the rank of the evaluation matrix at each degree.
pub fn ai_rank_scan(s: &SBox) -> u32 {
    let n = s.bits();
    let vars = 2 * n;
    for d in 1..=vars {
        let monos: Vec<usize> = (0..1usize << vars).filter(|m| m.count_ones() <= d).collect();
        if monos.len() > s.len() {
            return d;
        }
        let rows: Vec<Vec<u8>> = (0..s.len())
            .map(|x| {
                let point = x | usize::from(s.apply(x)) << n;
                monos.iter().map(|&m| u8::from(point & m == m)).collect()
            })
            .collect();
        if rank_unpacked(rows) < monos.len() {
            return d;
        }
    }
    vars
}
