use super::cost_model::{CostModel, CostModelError};
use super::OffloadPattern;
use crate::replace::variant_dir;
use crate::span::fnv1a64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExecutorError {
    #[error(transparent)]
    UncoveredPattern(#[from] CostModelError),
    #[error("command exited with {}: {output}", code.map_or("a signal".to_string(), |c| format!("status {c}")))]
    NonZeroExit { code: Option<i32>, output: String },
    #[error("command timed out after {0:?}")]
    Timeout(Duration),
    #[error("command template must contain {{variant_dir}}")]
    MissingVariantDir,
    #[error("cannot run command: {0}")]
    Spawn(std::io::Error),
    #[error("invalid samples: {0}")]
    InvalidSamples(String),
    #[error("cannot prepare variant: {0}")]
    Prepare(String),
}

/// A verification environment that times offload patterns.
pub trait Executor {
    fn tag(&self) -> String;

    /// One elapsed-seconds sample per repetition.
    fn measure(
        &mut self,
        pattern: &OffloadPattern,
        repetitions: usize,
    ) -> Result<Vec<f64>, ExecutorError>;
}

/// Samples for `pattern` under `cost_model`: model time scaled by uniform
/// noise in `[-noise, noise]` drawn from a generator seeded with `seed`.
pub fn simulated_measure(
    pattern: &OffloadPattern,
    cost_model: &CostModel,
    seed: u64,
    repetitions: usize,
) -> Result<Vec<f64>, ExecutorError> {
    let t = cost_model.seconds(&pattern.id(), pattern.selected().iter().copied())?;
    Ok(noisy_samples(t, cost_model.noise, seed, repetitions))
}

/// `repetitions` copies of `t`, each scaled by `1 + u` with `u` uniform in
/// `[-noise, noise]`. Zero noise returns `t` exactly.
pub fn noisy_samples(t: f64, noise: f64, seed: u64, repetitions: usize) -> Vec<f64> {
    if noise == 0.0 {
        return vec![t; repetitions];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-noise, noise);
    (0..repetitions)
        .map(|_| t * (1.0 + dist.sample(&mut rng)))
        .collect()
}

/// Desk-scale stand-in for accelerator runs.
#[derive(Clone, Debug)]
pub struct SimulatedExecutor {
    pub cost_model: CostModel,
    pub seed: u64,
}

impl SimulatedExecutor {
    pub fn new(cost_model: CostModel, seed: u64) -> Self {
        SimulatedExecutor { cost_model, seed }
    }
}

impl Executor for SimulatedExecutor {
    fn tag(&self) -> String {
        "simulated".into()
    }

    fn measure(
        &mut self,
        pattern: &OffloadPattern,
        repetitions: usize,
    ) -> Result<Vec<f64>, ExecutorError> {
        // Per-pattern stream so results do not depend on measurement order.
        let seed = self.seed ^ fnv1a64(pattern.id().as_bytes());
        simulated_measure(pattern, &self.cost_model, seed, repetitions)
    }
}

/// Run `command_template` (with `{variant_dir}` substituted) inside
/// `dir` once per repetition and time each run.
pub fn real_measure(
    dir: &Path,
    command_template: &str,
    timeout: Duration,
    repetitions: usize,
) -> Result<Vec<f64>, ExecutorError> {
    if !command_template.contains("{variant_dir}") {
        return Err(ExecutorError::MissingVariantDir);
    }
    let command = command_template.replace("{variant_dir}", &dir.display().to_string());
    (0..repetitions)
        .map(|_| run_once(dir, &command, timeout))
        .collect()
}

fn run_once(dir: &Path, command: &str, timeout: Duration) -> Result<f64, ExecutorError> {
    let start = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(ExecutorError::Spawn)?;
    let drain = |r: Option<Box<dyn Read + Send>>| {
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            if let Some(mut r) = r {
                let _ = r.read_to_end(&mut buf);
            }
            buf
        })
    };
    let out = drain(
        child
            .stdout
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
    );
    let err = drain(
        child
            .stderr
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
    );
    let status = loop {
        if let Some(status) = child.try_wait().map_err(ExecutorError::Spawn)? {
            break status;
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ExecutorError::Timeout(timeout));
        }
        std::thread::sleep(Duration::from_millis(1));
    };
    let elapsed = start.elapsed().as_secs_f64();
    if !status.success() {
        let mut output = String::from_utf8_lossy(&out.join().unwrap_or_default()).into_owned();
        output.push_str(&String::from_utf8_lossy(&err.join().unwrap_or_default()));
        return Err(ExecutorError::NonZeroExit {
            code: status.code(),
            output,
        });
    }
    Ok(elapsed.max(f64::MIN_POSITIVE))
}

/// Runs an operator-supplied command in each pattern's variant directory.
#[derive(Clone, Debug)]
pub struct CommandExecutor {
    pub workdir: PathBuf,
    pub command_template: String,
    pub timeout: Duration,
}

impl Executor for CommandExecutor {
    fn tag(&self) -> String {
        "real".into()
    }

    fn measure(
        &mut self,
        pattern: &OffloadPattern,
        repetitions: usize,
    ) -> Result<Vec<f64>, ExecutorError> {
        let dir = variant_dir(&self.workdir, pattern);
        std::fs::create_dir_all(&dir).map_err(|e| ExecutorError::Prepare(e.to_string()))?;
        real_measure(&dir, &self.command_template, self.timeout, repetitions)
    }
}
