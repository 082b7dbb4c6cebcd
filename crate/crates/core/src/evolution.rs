//! Search engines: the elite hill-climbing genetic algorithm and a
//! textbook generational GA used as a baseline.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::properties::{full_report, PropertyReport};
use crate::sbox::{distinct_pair, SBox, MAX_BITS, MIN_BITS};
use crate::seed::RngSeed;
use crate::spectral::{Cost, CostParams, EvalResult, Evaluator, WhsEvaluator};

// Stream tags keep the random inputs of different phases disjoint.
const INIT_STREAM: u64 = 0;
const CHILD_STREAM: u64 = 1;
const BASELINE_STREAM: u64 = 2;

/// Configuration of one run of the elite search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    pub n: u32,
    /// Number of elites kept after each pruning.
    pub k_pop: usize,
    /// Iteration cap.
    pub k_iter: u64,
    /// Children produced per elite per iteration.
    pub k_mut: usize,
    pub target_nl: u32,
    pub cost: CostParams,
    pub seed: RngSeed,
    /// Worker threads used to evaluate the children of one iteration.
    pub lanes: usize,
    pub record_trace: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            n: 8,
            k_pop: 1,
            k_iter: 150_000,
            k_mut: 7,
            target_nl: 104,
            cost: CostParams::default(),
            seed: RngSeed(0),
            lanes: 8,
            record_trace: false,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_BITS..=MAX_BITS).contains(&self.n) {
            return Err(Error::UnsupportedWidth(self.n));
        }
        for (name, v) in [
            ("k_pop", self.k_pop as u64),
            ("k_mut", self.k_mut as u64),
            ("k_iter", self.k_iter),
            ("lanes", self.lanes as u64),
        ] {
            if v == 0 {
                return Err(Error::InvalidParams(format!("{name} must be at least 1")));
            }
        }
        self.cost.validate()
    }
}

/// An evaluated S-box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub sbox: SBox,
    pub nl: u32,
    pub cost: Cost,
}

impl Candidate {
    pub fn new(sbox: SBox, eval: EvalResult) -> Candidate {
        Candidate {
            sbox,
            nl: eval.nl,
            cost: eval.cost,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub success: bool,
    /// The S-box meeting the target, when one was found.
    pub sbox: Option<SBox>,
    /// Best candidate seen: the winner on success, otherwise the top elite.
    pub best: Candidate,
    /// Number of S-boxes evaluated, initial population included.
    pub k_sbox: u64,
    pub iterations_used: u64,
    /// Best `(nl, cost)` of the elite pool at the start of every iteration.
    pub trace: Option<Vec<(u32, Cost)>>,
}

/// Truncation selection: sorts by nonlinearity descending, then cost
/// ascending, keeping earlier entries first on ties, and keeps `k_pop`.
pub fn elite_selection(mut pop: Vec<Candidate>, k_pop: usize) -> Vec<Candidate> {
    pop.sort_by(|a, b| b.nl.cmp(&a.nl).then(a.cost.cmp(&b.cost)));
    pop.truncate(k_pop);
    pop
}

/// Runs the elite search with the default Walsh spectrum evaluator.
pub fn ga_modified(params: &SearchParams) -> Result<SearchOutcome> {
    let evaluator = WhsEvaluator::new(params.cost)?;
    ga_modified_with(params, &evaluator)
}

/// Elite search with a caller-supplied evaluator (`params.cost` is ignored).
///
/// Each iteration prunes the pool to the best `k_pop`, then every elite
/// spawns `k_mut` children, each a copy of the elite with one random
/// transposition. Children join the pool for the next pruning. The search
/// stops at the first evaluated S-box reaching `target_nl`.
///
/// Child `(t, p, k)` draws its transposition from its own substream and
/// results are scanned in `(p, k)` order, so outcomes (including `k_sbox`,
/// which counts evaluations up to and including the winner) do not depend
/// on `lanes` or on scheduling.
pub fn ga_modified_with<E: Evaluator + ?Sized>(
    params: &SearchParams,
    evaluator: &E,
) -> Result<SearchOutcome> {
    params.validate()?;
    let pool = if params.lanes > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(params.lanes)
                .build()
                .map_err(|e| Error::InvalidParams(format!("cannot start worker lanes: {e}")))?,
        )
    } else {
        None
    };
    let run_batch = |boxes: Vec<SBox>| -> Result<Vec<Candidate>> {
        let eval = |s: SBox| evaluator.evaluate(&s).map(|r| Candidate::new(s, r));
        match &pool {
            Some(pool) => pool.install(|| boxes.into_par_iter().map(eval).collect()),
            None => boxes.into_iter().map(eval).collect(),
        }
    };
    let seed = params.seed;
    let mut trace = params.record_trace.then(Vec::new);
    let mut k_sbox = 0u64;

    let initial = (0..params.k_pop)
        .map(|idx| SBox::random(params.n, &mut seed.stream(&[INIT_STREAM, idx as u64])))
        .collect::<Result<Vec<_>>>()?;
    let mut population = run_batch(initial)?;
    for c in &population {
        k_sbox += 1;
        if c.nl >= params.target_nl {
            return Ok(SearchOutcome {
                success: true,
                sbox: Some(c.sbox.clone()),
                best: c.clone(),
                k_sbox,
                iterations_used: 0,
                trace,
            });
        }
    }

    for t in 0..params.k_iter {
        population = elite_selection(population, params.k_pop);
        if let Some(trace) = trace.as_mut() {
            trace.push((population[0].nl, population[0].cost));
        }
        let children: Vec<SBox> = population
            .iter()
            .enumerate()
            .flat_map(|(p, parent)| {
                (0..params.k_mut).map(move |k| {
                    let mut rng = seed.stream(&[CHILD_STREAM, t, p as u64, k as u64]);
                    parent.sbox.mutate(&mut rng)
                })
            })
            .collect();
        let children = run_batch(children)?;
        for c in &children {
            k_sbox += 1;
            if c.nl >= params.target_nl {
                return Ok(SearchOutcome {
                    success: true,
                    sbox: Some(c.sbox.clone()),
                    best: c.clone(),
                    k_sbox,
                    iterations_used: t + 1,
                    trace,
                });
            }
        }
        population.extend(children);
    }

    let best = elite_selection(population, 1).remove(0);
    Ok(SearchOutcome {
        success: false,
        sbox: None,
        best,
        k_sbox,
        iterations_used: params.k_iter,
        trace,
    })
}

/// Configuration of the generational baseline GA.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineGaParams {
    pub n: u32,
    /// Population size; must be even.
    pub pop_size: usize,
    pub generations: u64,
    pub crossover_rate: f64,
    /// Probability that a child receives one random transposition.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub seed: RngSeed,
}

impl Default for BaselineGaParams {
    fn default() -> Self {
        BaselineGaParams {
            n: 8,
            pop_size: 50,
            generations: 1000,
            crossover_rate: 0.8,
            mutation_rate: 0.2,
            tournament_size: 3,
            seed: RngSeed(0),
        }
    }
}

impl BaselineGaParams {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_BITS..=MAX_BITS).contains(&self.n) {
            return Err(Error::UnsupportedWidth(self.n));
        }
        if self.pop_size < 2 || self.pop_size % 2 != 0 {
            return Err(Error::InvalidParams("pop_size must be even and at least 2".into()));
        }
        if self.tournament_size < 2 {
            return Err(Error::InvalidParams("tournament_size must be at least 2".into()));
        }
        for (name, p) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

fn fitter(a: &Candidate, b: &Candidate) -> bool {
    (a.nl, std::cmp::Reverse(a.cost)) > (b.nl, std::cmp::Reverse(b.cost))
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [Candidate], size: usize, rng: &mut R) -> &'a Candidate {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.gen_range(0..pop.len())];
        if fitter(c, best) {
            best = c;
        }
    }
    best
}

// Child with `outer` outside `[lo, hi)` and `inner` inside; values of
// `outer` that clash with the copied segment are mapped through the
// segment's positional pairing until they no longer clash.
fn pmx_child(outer: &[u8], inner: &[u8], lo: usize, hi: usize) -> Vec<u8> {
    let mut segment_pos = vec![usize::MAX; outer.len()];
    for (i, &v) in inner.iter().enumerate().take(hi).skip(lo) {
        segment_pos[usize::from(v)] = i;
    }
    outer
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if (lo..hi).contains(&i) {
                return inner[i];
            }
            let mut v = v;
            while segment_pos[usize::from(v)] != usize::MAX {
                v = outer[segment_pos[usize::from(v)]];
            }
            v
        })
        .collect()
}

/// Two-point crossover exchanging the segment `[lo, hi)` between parents,
/// with partially-mapped repair so both children remain permutations.
pub fn pmx_crossover(p1: &SBox, p2: &SBox, lo: usize, hi: usize) -> Result<(SBox, SBox)> {
    if p1.bits() != p2.bits() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            found: p2.len(),
        });
    }
    if lo > hi || hi > p1.len() {
        return Err(Error::IndexOutOfRange {
            index: hi.max(lo),
            len: p1.len(),
        });
    }
    let c1 = pmx_child(p1.table(), p2.table(), lo, hi);
    let c2 = pmx_child(p2.table(), p1.table(), lo, hi);
    Ok((
        SBox::from_table(p1.bits(), &c1)?,
        SBox::from_table(p1.bits(), &c2)?,
    ))
}

/// Baseline GA returning the final population alongside the outcome.
pub fn ga_baseline_with_population(
    params: &BaselineGaParams,
    target_nl: u32,
    cost: CostParams,
) -> Result<(SearchOutcome, Vec<Candidate>)> {
    params.validate()?;
    let evaluator = WhsEvaluator::new(cost)?;
    let mut rng = params.seed.stream(&[BASELINE_STREAM]);
    let evaluate_all = |boxes: Vec<SBox>| -> Result<Vec<Candidate>> {
        boxes
            .into_iter()
            .map(|s| evaluator.evaluate(&s).map(|r| Candidate::new(s, r)))
            .collect()
    };

    let initial = (0..params.pop_size)
        .map(|_| SBox::random(params.n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let mut pop = evaluate_all(initial)?;
    let mut k_sbox = pop.len() as u64;
    let mut best = elite_selection(pop.clone(), 1).remove(0);

    for _ in 0..params.generations {
        let mut next = Vec::with_capacity(params.pop_size);
        for _ in 0..params.pop_size / 2 {
            let p1 = &tournament(&pop, params.tournament_size, &mut rng).sbox;
            let p2 = &tournament(&pop, params.tournament_size, &mut rng).sbox;
            let (mut c1, mut c2) = if rng.gen::<f64>() < params.crossover_rate {
                let a = rng.gen_range(0..=p1.len());
                let b = rng.gen_range(0..=p1.len());
                pmx_crossover(p1, p2, a.min(b), a.max(b))?
            } else {
                (p1.clone(), p2.clone())
            };
            for c in [&mut c1, &mut c2] {
                if rng.gen::<f64>() < params.mutation_rate {
                    let (i, j) = distinct_pair(c.len(), &mut rng);
                    *c = c.swapped(i, j)?;
                }
            }
            next.push(c1);
            next.push(c2);
        }
        pop = evaluate_all(next)?;
        k_sbox += pop.len() as u64;
        let gen_best = elite_selection(pop.clone(), 1).remove(0);
        if fitter(&gen_best, &best) {
            best = gen_best;
        }
    }

    let success = best.nl >= target_nl;
    let outcome = SearchOutcome {
        success,
        sbox: success.then(|| best.sbox.clone()),
        best,
        k_sbox,
        iterations_used: params.generations,
        trace: None,
    };
    Ok((outcome, pop))
}

/// Generational GA with tournament selection, repaired two-point crossover
/// and swap mutation. Runs all generations and reports the best S-box seen.
pub fn ga_baseline(params: &BaselineGaParams, target_nl: u32, cost: CostParams) -> Result<SearchOutcome> {
    ga_baseline_with_population(params, target_nl, cost).map(|(o, _)| o)
}

/// One search run with its parameters, timing and the property report of
/// the returned (or best) S-box.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub params: SearchParams,
    pub outcome: SearchOutcome,
    pub report: PropertyReport,
    pub duration: Duration,
}

impl RunRecord {
    pub const CSV_HEADER: &'static str =
        "seed,n,k_pop,k_mut,k_iter,target_nl,success,k_sbox,iterations_used,nl,delta,degree,ai,duration_ms";

    pub fn duration_ms(&self) -> u64 {
        self.duration.as_millis() as u64
    }

    pub fn fields(&self) -> [(&'static str, String); 14] {
        let p = &self.params;
        let o = &self.outcome;
        let r = &self.report;
        [
            ("seed", p.seed.0.to_string()),
            ("n", p.n.to_string()),
            ("k_pop", p.k_pop.to_string()),
            ("k_mut", p.k_mut.to_string()),
            ("k_iter", p.k_iter.to_string()),
            ("target_nl", p.target_nl.to_string()),
            ("success", o.success.to_string()),
            ("k_sbox", o.k_sbox.to_string()),
            ("iterations_used", o.iterations_used.to_string()),
            ("nl", r.nl.to_string()),
            ("delta", r.delta.to_string()),
            ("degree", r.degree.to_string()),
            ("ai", r.ai.to_string()),
            ("duration_ms", self.duration_ms().to_string()),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.fields().map(|(_, v)| v).join(",")
    }

    pub fn to_kv(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RunRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.fields() {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Runs [`ga_modified`] and records timing and the final property report.
pub fn run_single(params: &SearchParams) -> Result<RunRecord> {
    let start = Instant::now();
    let outcome = ga_modified(params)?;
    let duration = start.elapsed();
    let report = full_report(outcome.sbox.as_ref().unwrap_or(&outcome.best.sbox));
    Ok(RunRecord {
        params: *params,
        outcome,
        report,
        duration,
    })
}
