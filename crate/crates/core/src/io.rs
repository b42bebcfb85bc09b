//! JSON input format for circuit polynomials.
//!
//! ```json
//! { "n": 2, "alphas": [[0,0],[3,0],[0,3]], "y": [1,1],
//!   "b": [{"re":1,"im":0},{"re":1,"im":0},{"re":1,"im":0}],
//!   "c": {"re":-4,"im":0} }
//! ```
//!
//! The order of `b` matches the order of `alphas`. Unknown keys, non-finite
//! numbers and length mismatches are rejected with positioned messages.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::support::{CircuitPolynomial, SupportError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{0}")]
    Json(String),
    #[error("{position}: {message}")]
    Invalid { position: String, message: String },
    #[error(transparent)]
    Support(#[from] SupportError),
}

/// Complex number in the `{"re": …, "im": …}` wire form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(z: ComplexRepr) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialInput {
    n: usize,
    alphas: Vec<Vec<i64>>,
    y: Vec<i64>,
    b: Vec<ComplexRepr>,
    c: ComplexRepr,
}

fn invalid(position: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Invalid {
        position: position.into(),
        message: message.into(),
    }
}

/// Parses and validates a circuit polynomial; the result is normalized.
pub fn parse_polynomial(text: &str) -> Result<CircuitPolynomial, ParseError> {
    let input: PolynomialInput =
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let n = input.n;
    if input.alphas.len() != n + 1 {
        return Err(invalid(
            "alphas",
            format!("expected {} vertices for n = {n}, got {}", n + 1, input.alphas.len()),
        ));
    }
    for (i, a) in input.alphas.iter().enumerate() {
        if a.len() != n {
            return Err(invalid(
                format!("alphas[{i}]"),
                format!("expected length {n}, got {}", a.len()),
            ));
        }
    }
    if input.y.len() != n {
        return Err(invalid(
            "y",
            format!("expected length {n}, got {}", input.y.len()),
        ));
    }
    if input.b.len() != n + 1 {
        return Err(invalid(
            "b",
            format!("expected {} coefficients, got {}", n + 1, input.b.len()),
        ));
    }
    for (i, z) in input.b.iter().enumerate() {
        if !z.re.is_finite() {
            return Err(invalid(format!("b[{i}].re"), "not a finite number"));
        }
        if !z.im.is_finite() {
            return Err(invalid(format!("b[{i}].im"), "not a finite number"));
        }
        if z.re == 0.0 && z.im == 0.0 {
            return Err(invalid(format!("b[{i}]"), "outer coefficient must be nonzero"));
        }
    }
    if !input.c.re.is_finite() {
        return Err(invalid("c.re", "not a finite number"));
    }
    if !input.c.im.is_finite() {
        return Err(invalid("c.im", "not a finite number"));
    }
    let b: Vec<Complex64> = input.b.into_iter().map(Complex64::from).collect();
    Ok(CircuitPolynomial::from_parts(
        input.alphas,
        input.y,
        b,
        input.c.into(),
    )?)
}

/// Serializes a polynomial back into the input wire format (normalized echo).
pub fn polynomial_to_json(f: &CircuitPolynomial) -> serde_json::Value {
    let support = f.support();
    serde_json::json!({
        "n": f.dim(),
        "alphas": support.alphas().iter().map(|a| a.entries().to_vec()).collect::<Vec<_>>(),
        "y": support.inner().entries().to_vec(),
        "b": f.outer_coefficients().iter().map(|&z| ComplexRepr::from(z)).collect::<Vec<_>>(),
        "c": ComplexRepr::from(f.inner_coefficient()),
    })
}
