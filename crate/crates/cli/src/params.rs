//! Parameter records shared by flags, config files and reports.
//!
//! Each command gets a pair of types from [`params!`]: a flag struct where
//! every field is optional, and a resolved struct with concrete values and
//! defaults. Resolution overlays defaults, then the config file, then flags.

use std::path::PathBuf;

use owslab::learner::DEFAULT_SAMPLE_CONSTANT;
use serde::{Deserialize, Serialize};

macro_rules! params {
    (
        $(#[$smeta:meta])*
        $flags:ident => $resolved:ident {
            $( $(#[$fmeta:meta])* $field:ident : $ty:ty = $default:expr ),* $(,)?
        }
        $( optional { $( $(#[$ometa:meta])* $ofield:ident : $oty:ty ),* $(,)? } )?
    ) => {
        $(#[$smeta])*
        #[derive(clap::Args, Debug, Default, Serialize)]
        pub struct $flags {
            $( $(#[$fmeta])* #[arg(long)] pub $field: Option<$ty>, )*
            $($( $(#[$ometa])* #[arg(long)] pub $ofield: Option<$oty>, )*)?
        }

        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $resolved {
            $( pub $field: $ty, )*
            $($( pub $ofield: Option<$oty>, )*)?
        }

        impl Default for $resolved {
            fn default() -> Self {
                Self {
                    $( $field: $default, )*
                    $($( $ofield: None, )*)?
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

params! {
    /// Options accepted by every subcommand.
    GlobalArgs => Globals {
        /// Report format.
        #[arg(global = true, value_enum)]
        format: Format = Format::Json,
        /// Worker threads for trial batches; 0 picks the machine default.
        #[arg(global = true)]
        jobs: usize = 0,
    }
    optional {
        /// TOML file with defaults; command tables override top-level keys.
        #[arg(global = true)]
        config: PathBuf,
        /// Write the report here instead of stdout. Relative paths are
        /// taken from OWS_LAB_OUT_DIR when it is set.
        #[arg(global = true)]
        output: PathBuf,
    }
}

params! {
    KeysArgs => Keys {
        /// Domain length d.
        d: usize = 256,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
}

params! {
    DeriveArgs => Derive {
        /// Domain length d.
        d: usize = 256,
    }
    optional {
        /// Key, in hex.
        s: String,
        /// Sequence index.
        i: u64,
    }
}

params! {
    ForwardArgs => Forward {
        /// Domain length d.
        d: usize = 256,
    }
    optional {
        /// Target index, at least `i`.
        j: u64,
        /// Index of the known example.
        i: u64,
        /// Example string at `i`, in hex.
        sigma: String,
    }
}

params! {
    LearnArgs => Learn {
        /// Domain length d.
        d: usize = 49,
        /// Privacy parameter epsilon.
        epsilon: f64 = 1.0,
        /// 0 runs the pure learner, anything else the approximate one.
        delta: f64 = 0.0,
        /// Target population loss.
        alpha: f64 = 0.1,
        /// Allowed failure probability.
        beta: f64 = 0.1,
        /// Constant C of the sample-size rule.
        sample_constant: f64 = DEFAULT_SAMPLE_CONSTANT,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
    optional {
        /// Labeled examples, one JSON object per line.
        r#in: PathBuf,
        /// Where to write the binary hypothesis.
        out: PathBuf,
    }
}

params! {
    EvalArgs => Eval {}
    optional {
        /// Domain length; required for binary hypotheses, checked for JSON ones.
        d: usize,
        /// Hypothesis file: binary, or JSON when the name ends in `.json`.
        hypothesis: PathBuf,
        /// Labeled examples, one JSON object per line.
        r#in: PathBuf,
    }
}

params! {
    PacArgs => Pac {
        /// Domain length d.
        d: usize = 256,
        /// Privacy parameter epsilon.
        epsilon: f64 = 1.0,
        /// Privacy parameter delta.
        delta: f64 = 0.0,
        /// Target population loss.
        alpha: f64 = 0.1,
        /// Allowed failure probability.
        beta: f64 = 0.1,
        /// Independent trials.
        trials: u64 = 200,
        /// Distinct indices in the support of each distribution.
        support: usize = 100,
        /// Fresh draws used to estimate each population loss.
        mc_samples: usize = 2000,
        /// Constant C of the sample-size rule.
        sample_constant: f64 = DEFAULT_SAMPLE_CONSTANT,
        /// Use the sample-size rule; also the behaviour when `--n` is absent.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        auto_n: bool = false,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
    optional {
        /// Sample size per trial.
        n: u64,
    }
}

params! {
    DuelArgs => Duel {
        /// Domain length d.
        d: usize = 1024,
        /// Rounds per game.
        t: u64 = 2000,
        /// Random keys, one game each.
        keys: u64 = 50,
        /// constant-0, constant-1, random, forward, majority, last-label, mw or omniscient.
        baseline: String = "forward".into(),
        /// reverse (top index first) or forward (increasing indices).
        adversary: String = "reverse".into(),
        /// A game counts as a success when the learner beats the best
        /// constant predictor by more than this mistake rate.
        margin: f64 = 0.02,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
}

params! {
    AdvantageArgs => Advantage {
        /// Domain length d.
        d: usize = 1024,
        /// Independent trials.
        trials: u64 = 10_000,
        baseline: String = "forward".into(),
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
    optional {
        /// Challenge index; defaults to 32 below the top index.
        t: u64,
    }
}

params! {
    LemmasArgs => Lemmas {
        m_max: usize = 8,
        /// Generation bound runs on every universe size 1..=universe.
        universe: usize = 10,
        n_max: usize = 3,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
}

params! {
    CalibrateArgs => Calibrate {
        #[arg(value_delimiter = ',')]
        constants: Vec<f64> = vec![20.0, 40.0, 80.0, 160.0, 320.0],
        #[arg(value_delimiter = ',')]
        dims: Vec<usize> = vec![64, 256, 1024],
        /// Privacy parameter epsilon.
        epsilon: f64 = 1.0,
        /// Privacy parameter delta.
        delta: f64 = 0.0,
        /// Target population loss.
        alpha: f64 = 0.1,
        /// Allowed failure probability.
        beta: f64 = 0.1,
        /// Independent trials.
        trials: u64 = 200,
        support: usize = 100,
        mc_samples: usize = 2000,
        /// Successes may fall this far below (1 - beta) trials.
        slack: f64 = 10.0,
        /// Seed for every random choice of the run.
        seed: u64 = 0,
    }
}

params! {
    MechAuditArgs => MechAudit {
        #[arg(value_delimiter = ',')]
        epsilons: Vec<f64> = vec![0.1, 1.0, 5.0],
        /// Ratios are checked exhaustively for |z| <= window.
        window: i64 = 50,
        /// pmf rows are emitted for |z| <= table.
        table: i64 = 10,
    }
}
