//! Run configuration: defaults, config files and their validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = anyhow::Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => {
                        let known: Vec<&str> = Self::ALL.iter().map(|v| v.as_str()).collect();
                        bail!("unknown {} '{s}' (expected one of: {})", stringify!($name).to_lowercase(), known.join(", "))
                    }
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

named_enum!(ProblemKind {
    Toy => "toy",
    LeastSquares => "least-squares",
    Svm => "svm",
    TvL1 => "tv-l1",
    TvL2 => "tv-l2",
    SqrtLasso => "sqrt-lasso",
});

named_enum!(Algorithm {
    PdhgVc => "pdhg-vc",
    PdhgTripd => "pdhg-tripd",
    Purecd => "purecd",
});

named_enum!(Strategy {
    Constant => "constant",
    Goldstein => "goldstein",
    Rate => "rate",
    Combined => "combined",
    ResidualBalance => "residual-balance",
    MonitorIid => "monitor-iid",
    MonitorAr1 => "monitor-ar1",
    RbThenMonitor => "rb-then-monitor",
});

named_enum!(
    /// Quantity the stop tolerance applies to.
    Measure {
        Gap => "gap",
        Distance => "distance",
        Residual => "residual",
    }
);

impl Strategy {
    pub fn supports(&self, algo: Algorithm) -> bool {
        use Strategy::*;
        match self {
            Constant => true,
            Goldstein | Rate | Combined => algo != Algorithm::Purecd,
            ResidualBalance | MonitorIid | MonitorAr1 | RbThenMonitor => algo == Algorithm::Purecd,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Toy problem dimension.
    pub n: usize,
    pub mu_x: f64,
    pub mu_y: f64,
    pub eta: f64,
    /// Regularization weight; each problem has its own default.
    pub lambda: Option<f64>,
    /// LIBSVM file for least-squares, svm and sqrt-lasso.
    pub data: Option<PathBuf>,
    /// PGM image for the TV problems.
    pub image: Option<PathBuf>,
    /// Synthetic data shape when no file is given.
    pub rows: usize,
    pub cols: usize,
    /// Side of the synthetic image.
    pub size: usize,
    pub noise: f64,
    pub data_seed: u64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Toy,
            n: 50,
            mu_x: 0.01,
            mu_y: 0.1,
            eta: 0.001,
            lambda: None,
            data: None,
            image: None,
            rows: 60,
            cols: 30,
            size: 32,
            noise: 0.1,
            data_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub tau0: Option<f64>,
    pub sigma0: Option<f64>,
    pub s0: Option<f64>,
    pub seed: u64,
    pub max_iters: usize,
    /// Wall-clock budget in seconds.
    pub time_budget: Option<f64>,
    pub tol: f64,
    pub measure: Measure,
    /// Keep every this many iterations in the trace; 0 picks one row per
    /// iteration for PDHG and one per pass for PURE-CD.
    pub trace_every: usize,
    pub record_time: bool,
    pub trace: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            algorithm: Algorithm::PdhgVc,
            strategy: Strategy::Constant,
            tau0: None,
            sigma0: None,
            s0: None,
            seed: 0,
            max_iters: 100_000,
            time_budget: None,
            tol: 1e-10,
            measure: Measure::Gap,
            trace_every: 0,
            record_time: true,
            trace: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<ProblemSection>,
    run: Option<RunSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    name: Option<String>,
    n: Option<usize>,
    mu_x: Option<f64>,
    mu_y: Option<f64>,
    eta: Option<f64>,
    lambda: Option<f64>,
    data: Option<PathBuf>,
    image: Option<PathBuf>,
    rows: Option<usize>,
    cols: Option<usize>,
    size: Option<usize>,
    noise: Option<f64>,
    data_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    algo: Option<String>,
    strategy: Option<String>,
    tau0: Option<f64>,
    sigma0: Option<f64>,
    s0: Option<f64>,
    seed: Option<u64>,
    max_iters: Option<usize>,
    time_budget: Option<f64>,
    tol: Option<f64>,
    measure: Option<String>,
    trace_every: Option<usize>,
    record_time: Option<bool>,
    trace: Option<PathBuf>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunConfig {
    /// Applies a config file on top of `self`. Relative data paths resolve
    /// against the file's directory.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.merge_str(&text, base).with_context(|| format!("in config {}", path.display()))
    }

    pub fn merge_str(&mut self, text: &str, base: &Path) -> Result<()> {
        let file: FileConfig = toml::from_str(text)?;
        let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        if let Some(p) = file.problem {
            if let Some(name) = p.name {
                self.problem.kind = name.parse()?;
            }
            let spec = &mut self.problem;
            set(&mut spec.n, p.n);
            set(&mut spec.mu_x, p.mu_x);
            set(&mut spec.mu_y, p.mu_y);
            set(&mut spec.eta, p.eta);
            spec.lambda = p.lambda.or(spec.lambda);
            spec.data = p.data.map(resolve).or(spec.data.take());
            spec.image = p.image.map(resolve).or(spec.image.take());
            set(&mut spec.rows, p.rows);
            set(&mut spec.cols, p.cols);
            set(&mut spec.size, p.size);
            set(&mut spec.noise, p.noise);
            set(&mut spec.data_seed, p.data_seed);
        }
        if let Some(r) = file.run {
            if let Some(a) = r.algo {
                self.algorithm = a.parse()?;
            }
            if let Some(s) = r.strategy {
                self.strategy = s.parse()?;
            }
            if let Some(m) = r.measure {
                self.measure = m.parse()?;
            }
            self.tau0 = r.tau0.or(self.tau0);
            self.sigma0 = r.sigma0.or(self.sigma0);
            self.s0 = r.s0.or(self.s0);
            set(&mut self.seed, r.seed);
            set(&mut self.max_iters, r.max_iters);
            self.time_budget = r.time_budget.or(self.time_budget);
            set(&mut self.tol, r.tol);
            set(&mut self.trace_every, r.trace_every);
            set(&mut self.record_time, r.record_time);
            self.trace = r.trace.map(resolve).or(self.trace.take());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.strategy.supports(self.algorithm) {
            bail!("strategy '{}' cannot be used with algorithm '{}'", self.strategy, self.algorithm);
        }
        if self.algorithm == Algorithm::Purecd {
            if self.measure != Measure::Gap {
                bail!("purecd stops on the gap; measure '{}' is not available", self.measure);
            }
            if self.tau0.is_some() || self.sigma0.is_some() {
                bail!("purecd takes its steps from s0, not tau0/sigma0");
            }
        } else if self.s0.is_some() {
            bail!("s0 only applies to purecd; use tau0/sigma0");
        }
        for (name, v) in [("tau0", self.tau0), ("sigma0", self.sigma0), ("s0", self.s0), ("time_budget", self.time_budget)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("{name} must be positive, got {v}");
                }
            }
        }
        if !(self.tol >= 0.0) {
            bail!("tol must be non-negative, got {}", self.tol);
        }
        Ok(())
    }

    /// Rows kept in the trace: every `k`-th iteration.
    pub fn cadence(&self, n: usize) -> usize {
        match (self.trace_every, self.algorithm) {
            (0, Algorithm::Purecd) => n.max(1),
            (0, _) => 1,
            (k, _) => k,
        }
    }
}
