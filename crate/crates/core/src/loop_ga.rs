//! Genetic search over loop offload choices, the loop-level baseline that
//! function-block offloading is compared against.
//!
//! Each parallelizable loop gets one gene: 1 runs it on the GPU, 0 on the CPU.

use crate::frontend::ast::{Expr, ExprKind, Stmt, StmtKind};
use crate::frontend::SourceModel;
use crate::span::fnv1a64;
use crate::verify::{median, noisy_samples, CostModel};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// Math library functions treated as side-effect free.
const PURE_FUNCTIONS: &[&str] = &[
    "sin", "cos", "tan", "asin", "acos", "atan", "atan2", "sinh", "cosh", "tanh", "exp", "log",
    "log10", "log2", "pow", "sqrt", "cbrt", "fabs", "abs", "labs", "floor", "ceil", "fmod", "fmin",
    "fmax", "hypot", "sinf", "cosf", "expf", "logf", "powf", "sqrtf", "fabsf",
];

/// Loops that pass a conservative syntactic independence check: the body
/// calls only functions defined in this unit or pure math functions, never
/// leaves the loop early, and writes outer variables only through indexing.
/// Induction variables of nested `for` loops count as loop-private.
pub fn mark_parallelizable(model: &SourceModel) -> Vec<usize> {
    let defined: HashSet<&str> = model.functions.iter().map(|f| f.name.as_str()).collect();
    model
        .loops
        .iter()
        .filter(|info| {
            model
                .loop_stmt(info.loop_id)
                .and_then(Stmt::loop_body)
                .is_some_and(|body| body_is_independent(body, &defined))
        })
        .map(|info| info.loop_id)
        .collect()
}

fn body_is_independent(body: &Stmt, defined: &HashSet<&str>) -> bool {
    let mut private: HashSet<&str> = HashSet::new();
    let mut early_exit = false;
    body.walk(&mut |s| match &s.kind {
        StmtKind::Decl(ds)
        | StmtKind::StructDecl {
            declarators: ds, ..
        } => {
            private.extend(ds.iter().map(|d| d.name.as_str()));
        }
        StmtKind::For { init, step, .. } => {
            if let Some(init) = init {
                init.walk_own_exprs(&mut |e| {
                    if let ExprKind::Assign { lhs, .. } = &e.kind {
                        private.extend(lhs.ident_name());
                    }
                });
            }
            if let Some(step) = step {
                step.walk(&mut |e| match &e.kind {
                    ExprKind::Assign { lhs: target, .. }
                    | ExprKind::Unary {
                        operand: target, ..
                    }
                    | ExprKind::Postfix {
                        operand: target, ..
                    } => private.extend(target.ident_name()),
                    _ => {}
                });
            }
        }
        StmtKind::Return(_) | StmtKind::Break => early_exit = true,
        _ => {}
    });
    if early_exit {
        return false;
    }

    let mut ok = true;
    body.walk(&mut |s| {
        s.walk_own_exprs(&mut |e| {
            if !ok {
                return;
            }
            match &e.kind {
                ExprKind::Call { callee, .. } => {
                    ok = callee
                        .ident_name()
                        .is_some_and(|n| defined.contains(n) || PURE_FUNCTIONS.contains(&n));
                }
                ExprKind::Assign { lhs: target, .. } => ok = write_is_private(target, &private),
                ExprKind::Unary { op, operand } | ExprKind::Postfix { op, operand }
                    if op == "++" || op == "--" =>
                {
                    ok = write_is_private(operand, &private)
                }
                _ => {}
            }
        });
    });
    ok
}

/// A write is allowed to an indexed element, or to a variable (or member
/// of one) that is private to the loop body.
fn write_is_private(target: &Expr, private: &HashSet<&str>) -> bool {
    match &target.kind {
        ExprKind::Ident(n) => private.contains(n.as_str()),
        ExprKind::Index { .. } => true,
        ExprKind::Member { base, .. } => write_is_private(base, private),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chromosome(pub Vec<bool>);

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Chromosome(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `1` for GPU, `0` for CPU, gene 0 first.
    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse(bits: &str) -> Option<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Chromosome)
    }

    /// Gene positions set to GPU.
    pub fn offloaded(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
    }

    /// The `index`-th chromosome of length `len` in binary counting order.
    pub fn nth(len: usize, index: u64) -> Self {
        Chromosome((0..len).map(|i| index >> (len - 1 - i) & 1 == 1).collect())
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit mutation probability; `None` means 1 / chromosome length.
    pub mutation_rate: Option<f64>,
    pub seed: u64,
    pub elitism: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 16,
            generations: 30,
            crossover_rate: 0.9,
            mutation_rate: None,
            seed: 0,
            elitism: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("no parallelizable loops to search over")]
    NoLoops,
    #[error("fitness evaluation failed for {chromosome}: {message}")]
    Oracle { chromosome: String, message: String },
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: &str| Err(GaError::InvalidConfig(m.to_string()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.generations < 1 {
            return bad("generations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must be in [0, 1]");
        }
        if self
            .mutation_rate
            .is_some_and(|m| !(0.0..=1.0).contains(&m))
        {
            return bad("mutation_rate must be in [0, 1]");
        }
        if self.elitism < 1 || self.elitism >= self.population_size {
            return bad("elitism must be at least 1 and below population_size");
        }
        Ok(())
    }
}

/// Speedup of a chromosome over all-CPU execution; higher is better.
pub trait FitnessOracle {
    fn evaluate(&mut self, chromosome: &Chromosome) -> Result<f64, GaError>;
}

impl<F: FnMut(&Chromosome) -> f64> FitnessOracle for F {
    fn evaluate(&mut self, chromosome: &Chromosome) -> Result<f64, GaError> {
        Ok(self(chromosome))
    }
}

/// Fitness looked up by bitstring.
#[derive(Clone, Debug, Default)]
pub struct TableOracle(pub BTreeMap<String, f64>);

impl FitnessOracle for TableOracle {
    fn evaluate(&mut self, c: &Chromosome) -> Result<f64, GaError> {
        self.0
            .get(&c.bitstring())
            .copied()
            .ok_or_else(|| GaError::Oracle {
                chromosome: c.bitstring(),
                message: "not in table".into(),
            })
    }
}

/// Fitness from a cost model whose pattern ids are gene bitstrings
/// (exact mode) or whose block ids are gene positions (multiplicative mode).
#[derive(Clone, Debug)]
pub struct CostModelOracle {
    pub model: CostModel,
    pub seed: u64,
    pub repetitions: usize,
}

impl CostModelOracle {
    /// Median simulated time, with a per-chromosome noise stream.
    fn time(&self, c: &Chromosome) -> Result<f64, GaError> {
        let bits = c.bitstring();
        let t = self
            .model
            .seconds(&bits, c.offloaded())
            .map_err(|e| GaError::Oracle {
                chromosome: bits.clone(),
                message: e.to_string(),
            })?;
        let seed = self.seed ^ fnv1a64(bits.as_bytes());
        Ok(median(&noisy_samples(
            t,
            self.model.noise,
            seed,
            self.repetitions.max(1),
        )))
    }
}

impl FitnessOracle for CostModelOracle {
    fn evaluate(&mut self, c: &Chromosome) -> Result<f64, GaError> {
        let cpu = self.time(&Chromosome::zeros(c.len()))?;
        Ok(cpu / self.time(c)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Best fitness in each generation's population.
    pub history: Vec<f64>,
    /// Distinct chromosomes evaluated.
    pub evaluations: usize,
}

struct Evaluator<'a> {
    oracle: &'a mut dyn FitnessOracle,
    cache: HashMap<Chromosome, f64>,
    best: Option<(Chromosome, f64)>,
}

impl Evaluator<'_> {
    fn fitness(&mut self, c: &Chromosome) -> Result<f64, GaError> {
        if let Some(&f) = self.cache.get(c) {
            return Ok(f);
        }
        let f = self.oracle.evaluate(c)?;
        self.cache.insert(c.clone(), f);
        if self.best.as_ref().is_none_or(|(_, b)| f > *b) {
            self.best = Some((c.clone(), f));
        }
        Ok(f)
    }
}

/// Generational GA: size-2 tournaments, single-point crossover, per-bit
/// mutation, and the top `elitism` individuals carried over unchanged.
pub fn evolve(
    loop_ids: &[usize],
    oracle: &mut dyn FitnessOracle,
    cfg: &GaConfig,
) -> Result<GaResult, GaError> {
    cfg.validate()?;
    if loop_ids.is_empty() {
        return Err(GaError::NoLoops);
    }
    let len = loop_ids.len();
    let mutation = cfg.mutation_rate.unwrap_or(1.0 / len as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator {
        oracle,
        cache: HashMap::new(),
        best: None,
    };

    // Small gene spaces are enumerated outright in the first generation.
    let mut population: Vec<Chromosome> = Vec::with_capacity(cfg.population_size);
    if len < 64 && (1u64 << len) <= cfg.population_size as u64 {
        population.extend((0..1u64 << len).map(|i| Chromosome::nth(len, i)));
    }
    while population.len() < cfg.population_size {
        population.push(Chromosome((0..len).map(|_| rng.gen_bool(0.5)).collect()));
    }

    let mut history = Vec::with_capacity(cfg.generations);
    let mut scored = score(&population, &mut eval)?;
    history.push(scored[0].1);

    for _ in 1..cfg.generations {
        let mut next: Vec<Chromosome> = scored
            .iter()
            .take(cfg.elitism)
            .map(|(c, _)| c.clone())
            .collect();
        while next.len() < cfg.population_size {
            let a = tournament(&scored, &mut rng);
            let b = tournament(&scored, &mut rng);
            let (mut x, mut y) = (a.clone(), b.clone());
            if len > 1 && rng.gen_bool(cfg.crossover_rate) {
                let point = rng.gen_range(1..len);
                x.0[point..].copy_from_slice(&b.0[point..]);
                y.0[point..].copy_from_slice(&a.0[point..]);
            }
            for child in [&mut x, &mut y] {
                for gene in child.0.iter_mut() {
                    if rng.gen_bool(mutation) {
                        *gene = !*gene;
                    }
                }
            }
            next.push(x);
            if next.len() < cfg.population_size {
                next.push(y);
            }
        }
        population = next;
        scored = score(&population, &mut eval)?;
        history.push(scored[0].1);
    }

    let (best, best_fitness) = eval.best.expect("at least one evaluation");
    Ok(GaResult {
        best,
        best_fitness,
        history,
        evaluations: eval.cache.len(),
    })
}

/// Population with fitness, best first (stable for ties).
fn score(pop: &[Chromosome], eval: &mut Evaluator<'_>) -> Result<Vec<(Chromosome, f64)>, GaError> {
    let mut scored = pop
        .iter()
        .map(|c| eval.fitness(c).map(|f| (c.clone(), f)))
        .collect::<Result<Vec<_>, _>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(scored)
}

fn tournament<'a>(scored: &'a [(Chromosome, f64)], rng: &mut ChaCha8Rng) -> &'a Chromosome {
    let i = rng.gen_range(0..scored.len());
    let j = rng.gen_range(0..scored.len());
    if scored[i].1 >= scored[j].1 {
        &scored[i].0
    } else {
        &scored[j].0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_unit;

    #[test]
    fn elementwise_loop_is_parallel() {
        let m = parse_unit("void f(double *a, double *b, double *c, int n){ int i; for(i=0;i<n;i++){ a[i]=b[i]+c[i]; } }").unwrap();
        assert_eq!(mark_parallelizable(&m), [0]);
    }

    #[test]
    fn scalar_accumulation_is_not() {
        let m = parse_unit("double f(double *a, int n){ int i; double s; s = 0; for(i=0;i<n;i++){ s = s + a[i]; } return s; }").unwrap();
        assert!(mark_parallelizable(&m).is_empty());
        assert!(mark_parallelizable(&parse_unit("").unwrap()).is_empty());
    }

    #[test]
    fn nested_induction_variables_are_private() {
        let src = "void mm(double *a, double *b, double *c, int n){ int i, j, k; double t;\n\
                   for(i=0;i<n;i++){ for(j=0;j<n;j++){ double acc = 0; for(k=0;k<n;k++){ acc += a[i*n+k]*b[k*n+j]; } c[i*n+j] = acc; } } }";
        let m = parse_unit(src).unwrap();
        // i-loop and j-loop write c[] and private acc; k-loop accumulates into outer acc.
        assert_eq!(mark_parallelizable(&m), [0, 1]);
    }

    #[test]
    fn unknown_calls_and_early_exit_block_parallelism() {
        let m = parse_unit("void f(double *a, int n){ int i; for(i=0;i<n;i++){ a[i] = sqrt(a[i]); } for(i=0;i<n;i++){ log_value(a[i]); } for(i=0;i<n;i++){ if (a[i] < 0) break; } }").unwrap();
        assert_eq!(mark_parallelizable(&m), [0]);
    }

    #[test]
    fn chromosome_helpers() {
        assert_eq!(Chromosome::nth(3, 5).bitstring(), "101");
        assert_eq!(
            Chromosome::parse("0110")
                .unwrap()
                .offloaded()
                .collect::<Vec<_>>(),
            [1, 2]
        );
        assert!(Chromosome::parse("012").is_none());
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        assert!(GaConfig {
            population_size: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            elitism: 16,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            elitism: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            generations: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            crossover_rate: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn one_loop_reaches_table_optimum() {
        let mut oracle = TableOracle([("0".to_string(), 1.0), ("1".to_string(), 5.4)].into());
        let r = evolve(
            &[0],
            &mut oracle,
            &GaConfig {
                generations: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.best.bitstring(), "1");
        assert_eq!(r.best_fitness, 5.4);
        assert_eq!(r.history, [5.4]);
    }

    #[test]
    fn constant_oracle() {
        let mut oracle = |_: &Chromosome| 1.0;
        let r = evolve(&[0, 1, 2], &mut oracle, &GaConfig::default()).unwrap();
        assert_eq!(r.best_fitness, 1.0);
        assert_eq!(r.history.len(), 30);
    }

    #[test]
    fn empty_loop_list_is_an_error() {
        let mut oracle = |_: &Chromosome| 1.0;
        assert_eq!(
            evolve(&[], &mut oracle, &GaConfig::default()),
            Err(GaError::NoLoops)
        );
    }

    #[test]
    fn cost_model_oracle() {
        let model = CostModel::multiplicative(5.4, [(0, 1.0 / 5.4), (1, 2.0)], 0.0).unwrap();
        let mut o = CostModelOracle {
            model,
            seed: 0,
            repetitions: 1,
        };
        assert_eq!(o.evaluate(&Chromosome::parse("00").unwrap()).unwrap(), 1.0);
        assert!((o.evaluate(&Chromosome::parse("10").unwrap()).unwrap() - 5.4).abs() < 1e-12);
        assert!(o.evaluate(&Chromosome::parse("01").unwrap()).unwrap() < 1.0);
    }
}
