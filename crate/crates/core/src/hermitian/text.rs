//! Plain-text matrix format.
//!
//! ```text
//! dim dA dB
//! row col re im
//! ...
//! ```
//!
//! `dA dB` is `0 0` for an operator without bipartite shape. The writer emits
//! the upper triangle (`row <= col`, row-major) using shortest round-trip
//! decimal formatting, so a write/read cycle is exact. The reader accepts
//! either the upper triangle or the full `dim²` listing; missing lower entries
//! are filled by conjugation and listed lower entries are checked for
//! Hermiticity. Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use nalgebra::Complex;

use super::{BipartiteShape, CMatrix, HermitianOperator};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_operator<T: Real, W: Write>(op: &HermitianOperator<T>, mut out: W) -> Result<()> {
    let n = op.dim();
    let (da, db) = op.shape().map_or((0, 0), |s| (s.dim_a, s.dim_b));
    writeln!(out, "{n} {da} {db}")?;
    let m = op.matrix();
    for i in 0..n {
        for j in i..n {
            let z = m[(i, j)];
            writeln!(out, "{i} {j} {} {}", z.re, z.im)?;
        }
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<F: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<F> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

pub fn read_operator<T: Real, R: BufRead>(input: R) -> Result<HermitianOperator<T>> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header = header?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hline, "dim")?;
    let da: usize = field(toks.next(), hline, "dA")?;
    let db: usize = field(toks.next(), hline, "dB")?;
    if toks.next().is_some() {
        return Err(parse_err(hline, "trailing tokens in header"));
    }
    if n == 0 {
        return Err(parse_err(hline, "dim must be positive"));
    }
    let shape = match (da, db) {
        (0, 0) => None,
        (a, b) if a * b == n => Some(BipartiteShape::new(a, b)),
        (a, b) => return Err(parse_err(hline, format!("shape {a}x{b} does not match dim {n}"))),
    };

    let mut m = CMatrix::<T>::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (ln, text) in lines {
        let text = text?;
        let mut toks = text.split_whitespace();
        let i: usize = field(toks.next(), ln, "row")?;
        let j: usize = field(toks.next(), ln, "col")?;
        let re: f64 = field(toks.next(), ln, "real part")?;
        let im: f64 = field(toks.next(), ln, "imaginary part")?;
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        if i >= n || j >= n {
            return Err(parse_err(ln, format!("index ({i}, {j}) out of range for dim {n}")));
        }
        if !re.is_finite() || !im.is_finite() {
            return Err(parse_err(ln, "non-finite entry"));
        }
        if seen[i * n + j] {
            return Err(parse_err(ln, format!("duplicate entry ({i}, {j})")));
        }
        seen[i * n + j] = true;
        m[(i, j)] = Complex::new(T::lit(re), T::lit(im));
    }

    for i in 0..n {
        for j in i..n {
            match (seen[i * n + j], seen[j * n + i]) {
                (true, true) => {}
                (true, false) => m[(j, i)] = m[(i, j)].conj(),
                (false, true) => m[(i, j)] = m[(j, i)].conj(),
                (false, false) => {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("missing entry ({i}, {j})"),
                    })
                }
            }
        }
    }
    let op = HermitianOperator::with_tolerances(m, &Tolerances::for_scalar::<T>())?;
    match shape {
        Some(s) => op.with_shape(s),
        None => Ok(op),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gue_standard, RngStream};

    fn roundtrip(op: &HermitianOperator<f64>) -> HermitianOperator<f64> {
        let mut buf = Vec::new();
        write_operator(op, &mut buf).unwrap();
        read_operator(buf.as_slice()).unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let mut rng = RngStream::new(1, 0).generator();
        let g = gue_standard::<f64, _>(6, &mut rng)
            .with_shape(BipartiteShape::new(2, 3))
            .unwrap();
        assert_eq!(roundtrip(&g), g);
        let plain = gue_standard::<f64, _>(3, &mut rng);
        let back = roundtrip(&plain);
        assert_eq!(back, plain);
        assert!(back.shape().is_none());
    }

    #[test]
    fn accepts_full_listing() {
        let text = "2 0 0\n0 0 1 0\n0 1 0 2\n1 0 0 -2\n1 1 -1 0\n";
        let h: HermitianOperator<f64> = read_operator(text.as_bytes()).unwrap();
        assert_eq!(h.matrix()[(1, 0)], Complex::new(0.0, -2.0));
        assert!((h.trace_norm() - 2.0 * 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "",
            "2 1 3\n",
            "2 0 0\n0 0 1 0\n1 1 1 0\n",
            "2 0 0\n0 0 1 0\n0 1 1 0\n1 0 5 0\n1 1 1 0\n",
            "2 0 0\n0 0 1 0\n0 1 x 0\n1 1 1 0\n",
            "2 0 0\n0 0 1 0\n0 2 1 0\n1 1 1 0\n",
            "2 0 0\n0 0 1 0\n0 0 1 0\n0 1 0 0\n1 1 1 0\n",
        ];
        for text in cases {
            let r: Result<HermitianOperator<f64>> = read_operator(text.as_bytes());
            let err = r.expect_err(text);
            assert!(err.is_validation(), "{text:?}: {err}");
        }
    }
}
