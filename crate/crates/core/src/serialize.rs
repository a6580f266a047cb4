//! Structured-text serialization of trig Hamiltonians.
//!
//! Schema (JSON):
//!
//! ```json
//! {
//!   "q": 1,
//!   "terms": [
//!     { "n": [1], "m": [0], "phase": "cos", "coeff": 1.0 },
//!     { "n": [0], "m": [2], "phase": "sin", "coeff": -0.5 }
//!   ]
//! }
//! ```
//!
//! `n` and `m` are the integer wavevectors (length `q`), `phase` is
//! `"cos"` or `"sin"`. Constant modes (all-zero wavevector, cos) are
//! rejected: Hamiltonians are zero-mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trig::{Phase, TrigPolynomial};

#[derive(Serialize, Deserialize)]
struct TermRecord {
    n: Vec<i32>,
    m: Vec<i32>,
    phase: String,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    q: usize,
    terms: Vec<TermRecord>,
}

pub fn to_json(poly: &TrigPolynomial) -> String {
    let rec = PolyRecord {
        q: poly.q(),
        terms: poly
            .terms()
            .map(|(mode, c)| TermRecord {
                n: mode.n.clone(),
                m: mode.m.clone(),
                phase: match mode.phase {
                    Phase::Cos => "cos".into(),
                    Phase::Sin => "sin".into(),
                },
                coeff: c,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&rec).expect("serializable")
}

pub fn from_json(text: &str) -> Result<TrigPolynomial> {
    let rec: PolyRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad Hamiltonian JSON: {e}")))?;
    if rec.q == 0 {
        return Err(Error::Parse("q must be positive".into()));
    }
    let mut poly = TrigPolynomial::zero(rec.q);
    for t in rec.terms {
        if t.n.len() != rec.q || t.m.len() != rec.q {
            return Err(Error::Parse(format!(
                "wavevector length {} does not match q = {}",
                t.n.len(),
                rec.q
            )));
        }
        let phase = match t.phase.as_str() {
            "cos" => Phase::Cos,
            "sin" => Phase::Sin,
            other => return Err(Error::Parse(format!("unknown phase {other:?}"))),
        };
        let term = TrigPolynomial::term(t.n, t.m, phase, t.coeff)?;
        poly = poly.add(&term)?;
    }
    Ok(poly)
}
