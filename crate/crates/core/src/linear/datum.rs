//! Boundary data and their mini-language:
//! `harmonic:l,m:c[;l,m:c...]`, `geodesic:A,B,C,w0`, `file:<path>`,
//! each optionally prefixed by an amplitude `a*`.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{boundary_trace, GeodesicSliceSpec};
use crate::field::angular::AngularKind;
use crate::field::csv::read_boundary;
use crate::field::quadrature::associated_legendre;
use crate::field::Grid;
use std::sync::Arc;

/// One term `c * Y_l^m`: for `n = 3`, `P_l^|m|(cos theta)` times
/// `cos(m phi)` (`m >= 0`) or `sin(|m| phi)` (`m < 0`); for `n = 2`,
/// `cos(l theta)` or `sin(l theta)` by the sign of `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicTerm {
    pub l: usize,
    pub m: i64,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatumKind {
    Harmonic(Vec<HarmonicTerm>),
    Geodesic(GeodesicSliceSpec),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDatum {
    pub kind: DatumKind,
    pub amplitude: f64,
}

impl BoundaryDatum {
    pub fn harmonic(terms: &[(usize, i64, f64)]) -> Self {
        let terms = terms.iter().map(|&(l, m, coeff)| HarmonicTerm { l, m, coeff }).collect();
        Self { kind: DatumKind::Harmonic(terms), amplitude: 1.0 }
    }

    pub fn geodesic(spec: GeodesicSliceSpec) -> Self {
        Self { kind: DatumKind::Geodesic(spec), amplitude: 1.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self::harmonic(&[(0, 0, c)])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { kind: self.kind.clone(), amplitude: self.amplitude * s }
    }

    pub fn is_harmonic(&self) -> bool {
        matches!(self.kind, DatumKind::Harmonic(_))
    }

    /// Values at the boundary nodes of `grid`.
    pub fn sample(&self, grid: &Arc<Grid>) -> Result<Vec<f64>> {
        let b = grid.angular();
        let raw = match &self.kind {
            DatumKind::Harmonic(terms) => {
                let limit = match b.kind() {
                    AngularKind::Circle => b.n_nodes() / 2,
                    _ => b.n_theta() / 2,
                };
                for t in terms {
                    if t.l > limit {
                        return Err(Error::InvalidInput(format!("degree {} exceeds the grid limit {limit}", t.l)));
                    }
                    match b.kind() {
                        AngularKind::Meridian if t.m != 0 => {
                            return Err(Error::InvalidInput(format!("order m = {} on an axisymmetric grid", t.m)));
                        }
                        AngularKind::Sphere if t.m.unsigned_abs() as usize > t.l || 2 * t.m.unsigned_abs() as usize >= b.n_phi() => {
                            return Err(Error::InvalidInput(format!("order m = {} not representable for l = {}", t.m, t.l)));
                        }
                        _ => {}
                    }
                }
                (0..b.n_nodes()).map(|a| terms.iter().map(|t| t.coeff * harmonic_value(b.kind(), t, b.theta(a), b.phi(a))).sum()).collect()
            }
            DatumKind::Geodesic(spec) => {
                spec.validate()?;
                boundary_trace(spec, grid).0
            }
            DatumKind::File(path) => read_boundary(BufReader::new(File::open(path)?), grid)?,
        };
        Ok(raw.into_iter().map(|v: f64| self.amplitude * v).collect())
    }
}

fn harmonic_value(kind: AngularKind, t: &HarmonicTerm, theta: f64, phi: f64) -> f64 {
    let l = t.l as f64;
    if kind == AngularKind::Circle {
        return if t.m >= 0 { (l * theta).cos() } else { (l * theta).sin() };
    }
    let m = t.m.unsigned_abs() as usize;
    let p = associated_legendre(t.l, m, theta.cos(), theta.sin());
    let mf = m as f64;
    if t.m >= 0 {
        p * (mf * phi).cos()
    } else {
        p * (mf * phi).sin()
    }
}

fn num(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("non-finite number '{s}'")))
    }
}

impl FromStr for BoundaryDatum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (amplitude, body) = match s.split_once('*') {
            Some((a, rest)) if !a.contains(':') => (num(a)?, rest.trim()),
            _ => (1.0, s),
        };
        let (tag, rest) = body.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in '{s}'")))?;
        let kind = match tag {
            "harmonic" => {
                let mut terms = Vec::new();
                for part in rest.split(';').filter(|p| !p.trim().is_empty()) {
                    let (lm, c) = part.split_once(':').ok_or_else(|| Error::Parse(format!("expected l,m:c in '{part}'")))?;
                    let (l, m) = lm.split_once(',').ok_or_else(|| Error::Parse(format!("expected l,m in '{lm}'")))?;
                    let l = l.trim().parse().map_err(|_| Error::Parse(format!("bad degree '{l}'")))?;
                    let m = m.trim().parse().map_err(|_| Error::Parse(format!("bad order '{m}'")))?;
                    terms.push(HarmonicTerm { l, m, coeff: num(c)? });
                }
                if terms.is_empty() {
                    return Err(Error::Parse("harmonic datum without terms".into()));
                }
                DatumKind::Harmonic(terms)
            }
            "geodesic" => {
                let v = rest.split(',').map(num).collect::<Result<Vec<f64>>>()?;
                if v.len() != 4 {
                    return Err(Error::Parse(format!("geodesic needs A,B,C,w0, got {} values", v.len())));
                }
                DatumKind::Geodesic(GeodesicSliceSpec::new(v[0], v[1], v[2], v[3])?)
            }
            "file" if !rest.is_empty() => DatumKind::File(PathBuf::from(rest)),
            _ => return Err(Error::Parse(format!("unknown boundary datum '{s}'"))),
        };
        Ok(Self { kind, amplitude })
    }
}

impl fmt::Display for BoundaryDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amplitude != 1.0 {
            write!(f, "{}*", self.amplitude)?;
        }
        match &self.kind {
            DatumKind::Harmonic(terms) => {
                let parts: Vec<String> = terms.iter().map(|t| format!("{},{}:{}", t.l, t.m, t.coeff)).collect();
                write!(f, "harmonic:{}", parts.join(";"))
            }
            DatumKind::Geodesic(s) => write!(f, "geodesic:{},{},{},{}", s.a, s.b, s.c, s.w0),
            DatumKind::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    #[test]
    fn parses_and_displays() {
        for s in ["harmonic:2,0:1", "harmonic:1,0:0.5;3,-2:0.25", "geodesic:0,0,0.5,0.3", "file:/tmp/b.csv", "0.05*harmonic:2,0:1"] {
            let d: BoundaryDatum = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            assert_eq!(d.to_string().parse::<BoundaryDatum>().unwrap(), d);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in [
            "",
            "harmonic:",
            "harmonic:2:1",
            "harmonic:a,0:1",
            "geodesic:1,2",
            "geodesic:0.9,0.9,0,0",
            "sine:1",
            "file:",
            "x*harmonic:1,0:1",
        ] {
            assert!(s.parse::<BoundaryDatum>().is_err(), "{s}");
        }
    }

    #[test]
    fn legendre_datum_values() {
        let g = Grid::new(GridSpec::axisymmetric(8, 12)).unwrap();
        let d: BoundaryDatum = "harmonic:2,0:1".parse().unwrap();
        let v = d.sample(&g).unwrap();
        for (a, x) in v.iter().enumerate() {
            let c = g.angular().theta(a).cos();
            assert!((x - 0.5 * (3.0 * c * c - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_and_circle_orders() {
        let g = Grid::new(GridSpec::ball(8, 8, 16)).unwrap();
        let v = BoundaryDatum::harmonic(&[(2, -1, 2.0)]).sample(&g).unwrap();
        for (a, x) in v.iter().enumerate() {
            let (t, p) = (g.angular().theta(a), g.angular().phi(a));
            assert!((x - 2.0 * 3.0 * t.cos() * t.sin() * p.sin()).abs() < 1e-13);
        }
        let g = Grid::new(GridSpec::disk(8, 16)).unwrap();
        let v = BoundaryDatum::harmonic(&[(3, -1, 1.0)]).scaled(0.5).sample(&g).unwrap();
        for (a, x) in v.iter().enumerate() {
            assert!((x - 0.5 * (3.0 * g.angular().theta(a)).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn resolution_limits() {
        let g = Grid::new(GridSpec::axisymmetric(8, 8)).unwrap();
        assert!(BoundaryDatum::harmonic(&[(4, 0, 1.0)]).sample(&g).is_ok());
        assert!(BoundaryDatum::harmonic(&[(5, 0, 1.0)]).sample(&g).is_err());
        assert!(BoundaryDatum::harmonic(&[(2, 1, 1.0)]).sample(&g).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let g = Grid::new(GridSpec::axisymmetric(8, 8)).unwrap();
        let d: BoundaryDatum = "file:/nonexistent/boundary.csv".parse().unwrap();
        assert!(matches!(d.sample(&g), Err(Error::Io(_))));
    }
}
