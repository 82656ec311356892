//! Key generation and single-example queries.

use anyhow::Result;
use owslab::ows::{compute_forward, derive_example};
use owslab::rng::stream;
use owslab::{BitString, Params, SeedKey};
use serde_json::json;

use super::required;
use crate::output::{row, Output};
use crate::params::{Derive, Forward, Keys};

pub fn keys(p: Keys) -> Result<Output> {
    let params = Params::new(p.d)?;
    let s = SeedKey::random(&params, &mut stream(p.seed, 0));
    let result = json!({ "d": p.d, "k": params.k(), "s": s.to_hex(&params) });
    Ok(Output::new(
        json!({ "command": "keys", "params": p, "key": result }),
        vec![row(&result)],
    ))
}

pub fn derive(p: Derive) -> Result<Output> {
    let params = Params::new(p.d)?;
    let s = SeedKey::from_hex(&params, &required(&p.s, "s")?)?;
    let i = required(&p.i, "i")?;
    let x = derive_example(&params, &s, i)?;
    let result = json!({ "i": i, "sigma": x.sigma.to_hex(), "fbit": x.fbit as u8 });
    Ok(Output::new(
        json!({ "command": "derive", "params": p, "example": result }),
        vec![row(&result)],
    ))
}

pub fn forward(p: Forward) -> Result<Output> {
    let params = Params::new(p.d)?;
    let (j, i) = (required(&p.j, "j")?, required(&p.i, "i")?);
    let sigma = BitString::from_hex(params.sigma_bits(), &required(&p.sigma, "sigma")?)?;
    let x = compute_forward(&params, j, i, &sigma)?;
    let result = json!({ "j": j, "sigma": x.sigma.to_hex(), "fbit": x.fbit as u8 });
    Ok(Output::new(
        json!({ "command": "forward", "params": p, "example": result }),
        vec![row(&result)],
    ))
}
