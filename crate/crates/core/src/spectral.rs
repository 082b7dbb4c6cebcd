//! Walsh-Hadamard analysis of S-boxes: spectra, nonlinearity and the
//! Walsh spectrum cost that drives the search.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sbox::{SBox, TruthTable};

/// In-place fast Walsh-Hadamard butterfly. `buf.len()` must be a power of two.
pub fn fwht_in_place<T>(buf: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let len = buf.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Signed spectrum `W(a) = sum_x (-1)^(f(x) xor a.x)` for every `a`.
pub fn walsh_transform(tt: &TruthTable) -> Vec<i32> {
    let mut buf: Vec<i32> = tt.bits().iter().map(|&b| if b { -1 } else { 1 }).collect();
    fwht_in_place(&mut buf);
    buf
}

/// Walsh coefficients of every nonzero component `b . S` of an S-box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: u32,
    coeffs: Vec<i32>,
}

impl WalshSpectrum {
    pub fn of(s: &SBox) -> WalshSpectrum {
        let n = s.bits();
        let size = 1u32 << n;
        let mut coeffs = Vec::with_capacity(((size - 1) * size) as usize);
        for b in 1..size {
            coeffs.extend(walsh_transform(&s.component(b).expect("nonzero selector")));
        }
        WalshSpectrum { n, coeffs }
    }

    pub fn bits(&self) -> u32 {
        self.n
    }

    /// Coefficients of component `b` (`1 <= b < 2^n`), indexed by `a`.
    pub fn row(&self, b: u32) -> &[i32] {
        assert!(b != 0 && b < 1 << self.n, "selector out of range");
        let size = 1usize << self.n;
        let start = (b as usize - 1) * size;
        &self.coeffs[start..start + size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i32]> {
        self.coeffs.chunks_exact(1 << self.n)
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> u32 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn nonlinearity(&self) -> u32 {
        nl_from_max_abs(self.n, self.max_abs())
    }
}

fn nl_from_max_abs(n: u32, max_abs: u32) -> u32 {
    (1 << (n - 1)) - max_abs / 2
}

/// `2^(n-1) - max|W|/2` over all nonzero components.
pub fn nonlinearity(s: &SBox) -> u32 {
    WalshSpectrum::of(s).nonlinearity()
}

/// Offset `X` and exponent `R` of the cost `sum |W - X|^R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    pub offset: f64,
    pub exponent: u32,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            offset: 0.0,
            exponent: 12,
        }
    }
}

impl CostParams {
    pub fn new(offset: f64, exponent: u32) -> Result<CostParams> {
        let p = CostParams { offset, exponent };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.exponent == 0 {
            return Err(Error::InvalidParams("cost exponent must be at least 1".into()));
        }
        if !self.offset.is_finite() {
            return Err(Error::InvalidParams("cost offset must be finite".into()));
        }
        Ok(())
    }

    /// Integral offsets are evaluated with exact 128-bit arithmetic.
    pub fn integral_offset(&self) -> Option<i64> {
        (self.offset.fract() == 0.0 && self.offset.abs() < 9.0e15).then_some(self.offset as i64)
    }
}

/// A cost value. Within one configuration every cost has the same variant.
#[derive(Clone, Copy, Debug)]
pub enum Cost {
    Exact(u128),
    Real(f64),
}

impl Cost {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cost::Exact(v) => v as f64,
            Cost::Real(v) => v,
        }
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Exact(a), Cost::Exact(b)) => a.cmp(b),
            _ => self.as_f64().total_cmp(&other.as_f64()),
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Cost {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cost {}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Exact(v) => write!(f, "{v}"),
            Cost::Real(v) => write!(f, "{v:e}"),
        }
    }
}

fn exact_term(w: i64, offset: i64, exponent: u32) -> Option<u128> {
    let d = (i128::from(w) - i128::from(offset)).unsigned_abs();
    d.checked_pow(exponent)
}

fn real_term(w: f64, offset: f64, exponent: u32) -> f64 {
    (w - offset).abs().powi(exponent as i32)
}

/// `sum_b sum_a |W_b(a) - X|^R` over all nonzero components `b` and all
/// spectrum positions `a`, including `a = 0`.
pub fn whs_cost(s: &SBox, p: &CostParams) -> Result<Cost> {
    p.validate()?;
    cost_of_spectrum(&WalshSpectrum::of(s), p)
}

/// Sums the cost over an already computed spectrum.
pub fn cost_of_spectrum(spectrum: &WalshSpectrum, p: &CostParams) -> Result<Cost> {
    match p.integral_offset() {
        Some(offset) => {
            let mut acc: u128 = 0;
            for &w in spectrum.coeffs() {
                let term = exact_term(i64::from(w), offset, p.exponent).ok_or(Error::CostOverflow)?;
                acc = acc.checked_add(term).ok_or(Error::CostOverflow)?;
            }
            Ok(Cost::Exact(acc))
        }
        None => Ok(Cost::Real(
            spectrum
                .coeffs()
                .iter()
                .map(|&w| real_term(f64::from(w), p.offset, p.exponent))
                .sum(),
        )),
    }
}

/// Nonlinearity and cost of one S-box, as consumed by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalResult {
    pub nl: u32,
    pub cost: Cost,
}

/// Scores an S-box for the search. Any function `&SBox -> Result<EvalResult>`
/// qualifies, so alternative cost functions can be plugged in.
pub trait Evaluator: Sync {
    fn evaluate(&self, s: &SBox) -> Result<EvalResult>;
}

impl<F> Evaluator for F
where
    F: Fn(&SBox) -> Result<EvalResult> + Sync,
{
    fn evaluate(&self, s: &SBox) -> Result<EvalResult> {
        self(s)
    }
}

enum TermTable {
    // Entry `k` is the term for coefficient `k - 2^n`; `None` would overflow.
    Exact(Vec<Option<u128>>),
    Real(Vec<f64>),
}

/// Fused single-pass evaluator for the Walsh spectrum cost.
///
/// The spectrum of every component is computed once per call and reduced to
/// a histogram of coefficient values, from which both the nonlinearity and
/// the cost are read off. Term tables are precomputed per bit width.
pub struct WhsEvaluator {
    params: CostParams,
    tables: Vec<TermTable>,
}

impl WhsEvaluator {
    pub fn new(params: CostParams) -> Result<WhsEvaluator> {
        params.validate()?;
        let tables = (0..=crate::sbox::MAX_BITS)
            .map(|n| {
                let size = 1i64 << n;
                let range = -size..=size;
                match params.integral_offset() {
                    Some(offset) => TermTable::Exact(
                        range.map(|w| exact_term(w, offset, params.exponent)).collect(),
                    ),
                    None => TermTable::Real(
                        range
                            .map(|w| real_term(w as f64, params.offset, params.exponent))
                            .collect(),
                    ),
                }
            })
            .collect();
        Ok(WhsEvaluator { params, tables })
    }

    pub fn params(&self) -> &CostParams {
        &self.params
    }
}

const MAX_SIZE: usize = 1 << crate::sbox::MAX_BITS;

// Sylvester-Hadamard matrix H[x][a] = (-1)^(a.x) at full width; narrower
// widths use its top-left corner.
fn hadamard() -> &'static [i16] {
    static TABLE: OnceLock<Vec<i16>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..MAX_SIZE * MAX_SIZE)
            .map(|k| {
                let (x, a) = (k / MAX_SIZE, k % MAX_SIZE);
                if (x & a).count_ones() % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    })
}

const LANES: usize = 8;
const STRIP: usize = 32;
const BINS: usize = 2 * MAX_SIZE + 1;

type Histogram = [[u32; BINS]; LANES];

#[inline(always)]
fn butterfly(lo: &mut [i16], hi: &mut [i16]) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    }
}

/// Histogram of the spectrum of every nonzero component of the permutation
/// whose inverse is `inverse`, indexed by `W + 2^n`.
///
/// The spectrum of all components is the 2-D transform of the permutation
/// matrix. Transforming along x turns row y into the Hadamard row of
/// S^-1(y); the remaining transform runs down the columns, which is done in
/// strips small enough to stay in L1. The final stage is fused with the
/// histogram.
#[inline(always)]
fn spectrum_histogram(inverse: &[usize], hist: &mut Histogram) {
    let size = inverse.len();
    let width = size.min(STRIP);
    debug_assert!(width >= LANES);
    let h = hadamard();
    let mut buf = [0i16; MAX_SIZE * STRIP];
    let buf = &mut buf[..size * width];
    for col in (0..size).step_by(width) {
        for (row, &x) in buf.chunks_exact_mut(width).zip(inverse) {
            let src = x * MAX_SIZE + col;
            row.copy_from_slice(&h[src..src + width]);
        }
        let mut half = 1;
        while half < size / 2 {
            for block in buf.chunks_exact_mut(2 * half * width) {
                let (lo, hi) = block.split_at_mut(half * width);
                butterfly(lo, hi);
            }
            half *= 2;
        }
        let (lo, hi) = buf.split_at(size * width / 2);
        for (xs, ys) in lo.chunks_exact(LANES).zip(hi.chunks_exact(LANES)) {
            for ((hh, &x), &y) in hist.iter_mut().zip(xs).zip(ys) {
                hh[(x + y + size as i16) as usize] += 1;
                hh[(x - y + size as i16) as usize] += 1;
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn spectrum_histogram_avx2(inverse: &[usize], hist: &mut Histogram) {
    spectrum_histogram(inverse, hist)
}

fn value_histogram(inverse: &[usize]) -> [u32; BINS] {
    let mut lanes = [[0u32; BINS]; LANES];
    #[cfg(target_arch = "x86_64")]
    let done = if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the required CPU feature was detected at runtime.
        unsafe { spectrum_histogram_avx2(inverse, &mut lanes) };
        true
    } else {
        false
    };
    #[cfg(not(target_arch = "x86_64"))]
    let done = false;
    if !done {
        spectrum_histogram(inverse, &mut lanes);
    }
    let mut hist = [0u32; BINS];
    for lane in &lanes {
        for (h, c) in hist.iter_mut().zip(lane) {
            *h += c;
        }
    }
    // Remove the zero selector, whose spectrum is 2^n at a = 0 and 0 elsewhere.
    let size = inverse.len();
    hist[2 * size] -= 1;
    hist[size] -= size as u32 - 1;
    hist
}

impl Evaluator for WhsEvaluator {
    fn evaluate(&self, s: &SBox) -> Result<EvalResult> {
        let n = s.bits();
        let size = 1usize << n;
        let mut inverse = [0usize; MAX_SIZE];
        for (x, &y) in s.table().iter().enumerate() {
            inverse[y as usize] = x;
        }
        let hist = value_histogram(&inverse[..size]);

        let mut max_abs = 0u32;
        let mut exact: u128 = 0;
        let mut real = 0.0f64;
        let terms = &self.tables[n as usize];
        for k in 0..=2 * size {
            let c = hist[k];
            if c == 0 {
                continue;
            }
            max_abs = max_abs.max((k as i64 - size as i64).unsigned_abs() as u32);
            match terms {
                TermTable::Exact(t) => {
                    let term = t[k].ok_or(Error::CostOverflow)?;
                    let total = term.checked_mul(u128::from(c)).ok_or(Error::CostOverflow)?;
                    exact = exact.checked_add(total).ok_or(Error::CostOverflow)?;
                }
                TermTable::Real(t) => real += t[k] * f64::from(c),
            }
        }
        let cost = match terms {
            TermTable::Exact(_) => Cost::Exact(exact),
            TermTable::Real(_) => Cost::Real(real),
        };
        Ok(EvalResult {
            nl: nl_from_max_abs(n, max_abs),
            cost,
        })
    }
}

/// Nonlinearity and cost computed from a single spectrum pass.
pub fn evaluate(s: &SBox, p: &CostParams) -> Result<EvalResult> {
    WhsEvaluator::new(*p)?.evaluate(s)
}
