pub mod experiments;
pub mod items;
pub mod learn;
pub mod verify;

use anyhow::{anyhow, Result};
use owslab::arena::Baseline;

/// A value that has no default and was given neither as a flag nor in the
/// config.
fn required<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value.clone().ok_or_else(|| anyhow!("missing required option --{flag}"))
}

fn baseline(name: &str) -> Result<Baseline> {
    Baseline::parse(name).ok_or_else(|| {
        let known: Vec<_> = Baseline::EFFICIENT
            .iter()
            .chain(&[Baseline::Omniscient])
            .map(|b| b.name())
            .collect();
        anyhow!("unknown baseline `{name}`; expected one of {}", known.join(", "))
    })
}
