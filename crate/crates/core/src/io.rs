//! JSON state files.
//!
//! ```json
//! {"kind":"density","d":2,"re":[[...]],"im":[[...]]}
//! {"kind":"bloch","d":2,"r":[...],"s":[...],"T":[[...]]}
//! ```

use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_from_density, density_from_bloch, validate_density, BlochState};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Vec3};
use crate::tolerances::TOL_PSD;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Density {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    Bloch {
        d: usize,
        r: Vec3,
        s: Vec<f64>,
        #[serde(rename = "T")]
        t: Vec<Vec<f64>>,
    },
}

impl StateFile {
    pub fn from_state(state: &BlochState) -> Self {
        Self::Bloch {
            d: state.d,
            r: state.r,
            s: state.s.clone(),
            t: state.t.clone(),
        }
    }

    pub fn density_of(state: &BlochState) -> Result<Self> {
        let rho = density_from_bloch(state)?;
        Ok(Self::Density {
            d: Some(state.d),
            re: rho.real_parts(),
            im: Some(rho.imag_parts()),
        })
    }

    /// Converts to Bloch form, validating the density matrix. `d_hint` is used
    /// when the file omits `d`; a conflicting hint is an error.
    pub fn into_state(self, d_hint: Option<usize>) -> Result<BlochState> {
        match self {
            Self::Density { d, re, im } => {
                let n = re.len();
                let im = im.unwrap_or_else(|| vec![vec![0.0; n]; n]);
                let rho = ComplexMatrix::from_parts(&re, &im)?;
                let d = resolve_d(d, d_hint)?.unwrap_or(n / 2);
                bloch_from_density(&rho, d)
            }
            Self::Bloch { d, r, s, t } => {
                let d = resolve_d(Some(d), d_hint)?.unwrap_or(d);
                let state = BlochState::new(d, r, s, t)?;
                validate_density(&density_from_bloch(&state)?)?.ensure_valid(TOL_PSD)?;
                Ok(state)
            }
        }
    }
}

fn resolve_d(file: Option<usize>, hint: Option<usize>) -> Result<Option<usize>> {
    match (file, hint) {
        (Some(a), Some(b)) if a != b => Err(Error::ShapeMismatch {
            expected: format!("d = {b}"),
            found: format!("d = {a}"),
        }),
        (a, b) => Ok(a.or(b)),
    }
}

pub fn parse_state(text: &str, d_hint: Option<usize>) -> Result<BlochState> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidState(format!("malformed state file: {e}")))?;
    file.into_state(d_hint)
}

pub fn state_to_json(state: &BlochState) -> Result<String> {
    serde_json::to_string_pretty(&StateFile::from_state(state))
        .map_err(|e| Error::InvalidState(e.to_string()))
}
