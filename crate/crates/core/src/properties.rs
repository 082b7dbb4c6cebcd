//! Non-spectral S-box criteria: differential uniformity, algebraic degree,
//! balancedness and algebraic immunity, plus the aggregated report.

use std::fmt;

use crate::gf2::{BitMatrix, BitVec};
use crate::sbox::{SBox, TruthTable};
use crate::spectral::nonlinearity;

/// Difference distribution table: `counts[a][b] = #{x : S(x) ^ S(x ^ a) = b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceTable {
    n: u32,
    counts: Vec<u32>,
}

impl DifferenceTable {
    pub fn bits(&self) -> u32 {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.counts[a * (1 << self.n) + b]
    }

    pub fn row(&self, a: usize) -> &[u32] {
        let size = 1 << self.n;
        &self.counts[a * size..(a + 1) * size]
    }

    /// Largest entry over nonzero input differences.
    pub fn max_nontrivial(&self) -> u32 {
        let size = 1 << self.n;
        self.counts[size..].iter().copied().max().unwrap_or(0)
    }
}

pub fn difference_table(s: &SBox) -> DifferenceTable {
    let size = s.len();
    let mut counts = vec![0u32; size * size];
    for a in 0..size {
        let row = &mut counts[a * size..(a + 1) * size];
        for x in 0..size {
            row[usize::from(s.apply(x) ^ s.apply(x ^ a))] += 1;
        }
    }
    DifferenceTable { n: s.bits(), counts }
}

/// Differential uniformity, computed one row at a time without building
/// the whole table.
pub fn differential_uniformity(s: &SBox) -> u32 {
    let size = s.len();
    let mut row = vec![0u32; size];
    let mut best = 0;
    for a in 1..size {
        row.fill(0);
        for x in 0..size {
            row[usize::from(s.apply(x) ^ s.apply(x ^ a))] += 1;
        }
        best = best.max(*row.iter().max().expect("nonempty row"));
    }
    best
}

/// Algebraic normal form coefficients via the binary Moebius transform:
/// entry `u` is the coefficient of the monomial `prod_{i in u} x_i`.
pub fn anf(tt: &TruthTable) -> Vec<bool> {
    let mut c = tt.bits().to_vec();
    let len = c.len();
    let mut h = 1;
    while h < len {
        for block in c.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter().zip(hi.iter_mut()) {
                *b ^= *a;
            }
        }
        h *= 2;
    }
    c
}

/// Degree of a Boolean function (0 for constants, including the zero function).
pub fn boolean_degree(tt: &TruthTable) -> u32 {
    anf(tt)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(u, _)| u.count_ones())
        .max()
        .unwrap_or(0)
}

/// Maximum degree over all nonzero component combinations `v . S`.
pub fn algebraic_degree(s: &SBox) -> u32 {
    (1..1u32 << s.bits())
        .map(|v| boolean_degree(&s.component(v).expect("nonzero selector")))
        .max()
        .unwrap_or(0)
}

/// Support of the graph indicator of S: the points `(x, S(x))` of the
/// 2n-variable cube, encoded as `x | S(x) << n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIndicator {
    n: u32,
    support: Vec<u32>,
}

impl GraphIndicator {
    pub fn of(s: &SBox) -> GraphIndicator {
        let n = s.bits();
        let support = (0..s.len())
            .map(|x| x as u32 | u32::from(s.apply(x)) << n)
            .collect();
        GraphIndicator { n, support }
    }

    pub fn variables(&self) -> u32 {
        2 * self.n
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn contains(&self, point: u32) -> bool {
        let x = point & ((1 << self.n) - 1);
        self.support.get(x as usize) == Some(&point)
    }
}

/// All monomials of degree `<= max_degree` in `vars` variables, as variable
/// bitmasks, ordered by degree and then lexicographically by the sorted
/// variable index sets.
pub fn monomials(vars: u32, max_degree: u32) -> Vec<u32> {
    fn extend(vars: u32, start: u32, left: u32, mask: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for v in start..vars {
            extend(vars, v + 1, left - 1, mask | 1 << v, out);
        }
    }
    let mut out = Vec::new();
    for d in 0..=max_degree.min(vars) {
        extend(vars, 0, d, 0, &mut out);
    }
    out
}

/// Evaluation matrix of the monomials of degree `<= degree` (columns) at the
/// support points of the graph (rows). Its kernel is the space of
/// annihilators of degree `<= degree`.
pub fn annihilator_matrix(s: &SBox, degree: u32) -> (Vec<u32>, BitMatrix) {
    let graph = GraphIndicator::of(s);
    let cols = monomials(graph.variables(), degree);
    let mut m = BitMatrix::zeros(graph.support().len(), cols.len());
    for (r, &p) in graph.support().iter().enumerate() {
        for (c, &mono) in cols.iter().enumerate() {
            if p & mono == mono {
                m.set(r, c, true);
            }
        }
    }
    (cols, m)
}

/// A polynomial over GF(2) as a set of monomial bitmasks.
pub type Polynomial = Vec<u32>;

pub fn eval_polynomial(p: &[u32], point: u32) -> bool {
    p.iter().filter(|&&m| point & m == m).count() % 2 == 1
}

/// A basis of the nonzero polynomials of degree `<= degree` vanishing on the
/// graph of S.
pub fn annihilators(s: &SBox, degree: u32) -> Vec<Polynomial> {
    let (cols, m) = annihilator_matrix(s, degree);
    m.kernel()
        .iter()
        .map(|v: &BitVec| v.ones().map(|c| cols[c]).collect())
        .collect()
}

/// Dimension of the space of annihilators of degree `<= degree`.
pub fn annihilator_nullity(s: &SBox, degree: u32) -> usize {
    let (cols, m) = annihilator_matrix(s, degree);
    cols.len() - m.rank()
}

/// Smallest degree of a nonzero polynomial vanishing on the graph of S.
pub fn algebraic_immunity(s: &SBox) -> u32 {
    let vars = 2 * s.bits();
    let points = s.len();
    for d in 1..=vars {
        let count = monomials(vars, d).len();
        // more monomials than points always leaves a kernel
        if count > points || annihilator_nullity(s, d) > 0 {
            return d;
        }
    }
    vars
}

/// Each output value occurs equally often over all inputs.
pub fn is_balanced(s: &SBox) -> bool {
    let mut counts = vec![0u32; s.len()];
    for &y in s.table() {
        counts[usize::from(y)] += 1;
    }
    counts.windows(2).all(|w| w[0] == w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub nl: u32,
    pub delta: u32,
    pub degree: u32,
    pub ai: u32,
    pub balanced: bool,
}

pub fn full_report(s: &SBox) -> PropertyReport {
    PropertyReport {
        nl: nonlinearity(s),
        delta: differential_uniformity(s),
        degree: algebraic_degree(s),
        ai: algebraic_immunity(s),
        balanced: is_balanced(s),
    }
}

impl PropertyReport {
    pub const CSV_HEADER: &'static str = "nl,delta,degree,ai,balanced";

    pub fn to_kv(&self) -> String {
        self.to_string()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.nl, self.delta, self.degree, self.ai, self.balanced
        )
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nl={}", self.nl)?;
        writeln!(f, "delta={}", self.delta)?;
        writeln!(f, "degree={}", self.degree)?;
        writeln!(f, "ai={}", self.ai)?;
        writeln!(f, "balanced={}", self.balanced)
    }
}
