//! Writes `prg_vectors.txt` and `ows_vectors.txt` into the given directory.
//! Run once; the files are checked in and must never change.

use std::path::PathBuf;

use owslab::ows::vectors::{OwsVector, PrgVector};
use owslab::{Params, SeedKey};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).ok_or("usage: freeze_vectors <dir>")?);

    let mut prg = String::from("# k seed_hex left_hex right_hex\n");
    for k in [1u32, 2, 3, 4, 5, 8, 15, 31, 32, 63] {
        let mask = (1u64 << k) - 1;
        for seed in [0, 1, 0x5555_5555_5555_5555 & mask, mask] {
            prg.push_str(&PrgVector::compute(k, seed)?.to_line());
            prg.push('\n');
        }
    }
    std::fs::write(dir.join("prg_vectors.txt"), prg)?;

    let mut ows = String::from("# k s_hex i sigma_hex fbit   (d = (k+1)^2)\n");
    for k in [2u32, 3, 4, 5, 8, 15, 31] {
        let p = Params::for_k(k)?;
        let top = p.top_index();
        for s in [0, p.seed_mask() & 0x0123_4567_89ab_cdef, p.seed_mask()] {
            let key = SeedKey::new(&p, s)?;
            for i in [0, 1, top / 3, top / 2, top - 1, top] {
                ows.push_str(&OwsVector::compute(&p, key, i)?.to_line());
                ows.push('\n');
            }
        }
    }
    std::fs::write(dir.join("ows_vectors.txt"), ows)?;
    Ok(())
}
