//! Points `(z, η)` of the holomorphic tangent bundle and their text form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub z: [Complex64; 2],
    pub eta: [Complex64; 2],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad point syntax: {0}")]
pub struct PointParseError(pub String);

impl Point {
    pub fn new(z: [Complex64; 2], eta: [Complex64; 2]) -> Point {
        Point { z, eta }
    }

    pub fn from_parts(z1: (f64, f64), z2: (f64, f64), e1: (f64, f64), e2: (f64, f64)) -> Point {
        Point {
            z: [Complex64::new(z1.0, z1.1), Complex64::new(z2.0, z2.1)],
            eta: [Complex64::new(e1.0, e1.1), Complex64::new(e2.0, e2.1)],
        }
    }

    pub fn eta_norm(&self) -> f64 {
        (self.eta[0].norm_sqr() + self.eta[1].norm_sqr()).sqrt()
    }

    /// Same base point, fiber coordinate multiplied by `lambda`.
    pub fn scale_eta(&self, lambda: Complex64) -> Point {
        Point {
            z: self.z,
            eta: [self.eta[0] * lambda, self.eta[1] * lambda],
        }
    }
}

/// Parses `1`, `-2.5`, `3i`, `-i`, `1+2i`, `0.5-1e-3i`.
pub fn parse_complex(s: &str) -> Result<Complex64, PointParseError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || PointParseError(format!("cannot read complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|r| Complex64::new(r, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re_s, im_s) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_s.is_empty() {
        0.0
    } else {
        re_s.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im_s {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_pair(s: &str) -> Result<[Complex64; 2], PointParseError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(PointParseError(format!(
            "expected two comma-separated values in '{s}'"
        )));
    }
    Ok([parse_complex(parts[0])?, parse_complex(parts[1])?])
}

impl FromStr for Point {
    type Err = PointParseError;

    /// `z=a+bi,c+di; eta=e+fi,g+hi`
    fn from_str(s: &str) -> Result<Point, PointParseError> {
        let mut z = None;
        let mut eta = None;
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| PointParseError(format!("missing '=' in '{field}'")))?;
            match key.trim() {
                "z" => z = Some(parse_pair(val)?),
                "eta" => eta = Some(parse_pair(val)?),
                k => return Err(PointParseError(format!("unknown key '{k}'"))),
            }
        }
        match (z, eta) {
            (Some(z), Some(eta)) => Ok(Point { z, eta }),
            _ => Err(PointParseError("both z= and eta= are required".into())),
        }
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im < 0.0 || (c.im == 0.0 && c.im.is_sign_negative()) {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z={},{}; eta={},{}",
            fmt_complex(self.z[0]),
            fmt_complex(self.z[1]),
            fmt_complex(self.eta[0]),
            fmt_complex(self.eta[1])
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), c(-2.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("0.5-1e-3i").unwrap(), c(0.5, -1e-3));
        assert_eq!(parse_complex("1e-2 + i").unwrap(), c(1e-2, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn point_text_round_trip() {
        let p: Point = "z=0.5,0.1; eta=1,0.5i".parse().unwrap();
        assert_eq!(p.z[0], Complex64::new(0.5, 0.0));
        assert_eq!(p.eta[1], Complex64::new(0.0, 0.5));
        let q: Point = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        assert!("z=1,2".parse::<Point>().is_err());
        assert!("z=1; eta=1,1".parse::<Point>().is_err());
    }
}
