//! Compact text specs for generators, weights and ranges, as used on the
//! command line and in run configs.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::geometry::DiskPoint;
use crate::harmonic::{shadow_weight, ArcWeight, DiscreteMeasure};
use crate::sequences::{gen_perturbed_pairs, gen_radial, gen_section6, GeneratedSequence};

fn spec_err(kind: &'static str, input: &str, reason: impl Into<String>) -> LabError {
    LabError::Spec { kind, input: input.to_string(), reason: reason.into() }
}

fn numbers(kind: &'static str, input: &str, body: &str, count: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = body
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| spec_err(kind, input, "expected comma-separated numbers"))?;
    if v.len() != count {
        return Err(spec_err(kind, input, format!("expected {count} numbers, got {}", v.len())));
    }
    Ok(v)
}

fn as_count(kind: &'static str, input: &str, x: f64) -> Result<u32> {
    if x.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&x) {
        return Err(spec_err(kind, input, format!("{x} is not a count")));
    }
    Ok(x as u32)
}

/// `radial:q,N`, `section6:ε,n_max`, `pairs:η:<base>`, `points:re,im;re,im;...`
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Radial { q: f64, n: u32 },
    Section6 { epsilon: f64, n_max: u32 },
    Pairs { eta: f64, base: Box<GeneratorSpec> },
    Points(Vec<(f64, f64)>),
}

impl FromStr for GeneratorSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let k = "generator";
        let (name, body) = s.split_once(':').ok_or_else(|| spec_err(k, s, "expected kind:parameters"))?;
        match name {
            "radial" => {
                let v = numbers(k, s, body, 2)?;
                Ok(GeneratorSpec::Radial { q: v[0], n: as_count(k, s, v[1])? })
            }
            "section6" => {
                let v = numbers(k, s, body, 2)?;
                Ok(GeneratorSpec::Section6 { epsilon: v[0], n_max: as_count(k, s, v[1])? })
            }
            "pairs" => {
                let (eta, base) = body.split_once(':').ok_or_else(|| spec_err(k, s, "expected pairs:eta:<base>"))?;
                let eta = eta.trim().parse().map_err(|_| spec_err(k, s, "eta is not a number"))?;
                Ok(GeneratorSpec::Pairs { eta, base: Box::new(base.parse()?) })
            }
            "points" => {
                let pts = body
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| numbers(k, s, p, 2).map(|v| (v[0], v[1])))
                    .collect::<Result<_>>()?;
                Ok(GeneratorSpec::Points(pts))
            }
            _ => Err(spec_err(k, s, "unknown generator")),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Radial { q, n } => write!(f, "radial:{q},{n}"),
            GeneratorSpec::Section6 { epsilon, n_max } => write!(f, "section6:{epsilon},{n_max}"),
            GeneratorSpec::Pairs { eta, base } => write!(f, "pairs:{eta}:{base}"),
            GeneratorSpec::Points(p) => {
                let body: Vec<String> = p.iter().map(|(a, b)| format!("{a},{b}")).collect();
                write!(f, "points:{}", body.join(";"))
            }
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<GeneratedSequence> {
        match self {
            GeneratorSpec::Radial { q, n } => gen_radial(*q, *n),
            GeneratorSpec::Section6 { epsilon, n_max } => gen_section6(*epsilon, *n_max),
            GeneratorSpec::Pairs { eta, base } => {
                let b = base.build()?;
                gen_perturbed_pairs(&b, &vec![*eta; b.len()])
            }
            GeneratorSpec::Points(p) => {
                let pts = p.iter().map(|&(a, b)| DiskPoint::new(a, b)).collect::<Result<_>>()?;
                Ok(GeneratedSequence::explicit(pts))
            }
        }
    }
}

/// `zero`, `constant:c`, `indicator:a[,v]` (arc from angle 0 of normalized
/// length `a`), `arcs:start,len,v;...` (radians), `shadow:c0,c`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Constant(f64),
    Indicator { fraction: f64, value: f64 },
    Arcs(Vec<(f64, f64, f64)>),
    Shadow { c0: f64, c: f64 },
}

impl FromStr for WeightSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let k = "weight";
        if s == "zero" {
            return Ok(WeightSpec::Constant(0.0));
        }
        let (name, body) = s.split_once(':').ok_or_else(|| spec_err(k, s, "expected kind:parameters"))?;
        match name {
            "constant" => Ok(WeightSpec::Constant(numbers(k, s, body, 1)?[0])),
            "indicator" => {
                let n = body.split(',').count();
                let v = numbers(k, s, body, n)?;
                match v.as_slice() {
                    [a] => Ok(WeightSpec::Indicator { fraction: *a, value: 1.0 }),
                    [a, b] => Ok(WeightSpec::Indicator { fraction: *a, value: *b }),
                    _ => Err(spec_err(k, s, "expected indicator:a or indicator:a,v")),
                }
            }
            "arcs" => {
                let arcs = body
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| numbers(k, s, p, 3).map(|v| (v[0], v[1], v[2])))
                    .collect::<Result<_>>()?;
                Ok(WeightSpec::Arcs(arcs))
            }
            "shadow" => {
                let v = numbers(k, s, body, 2)?;
                Ok(WeightSpec::Shadow { c0: v[0], c: v[1] })
            }
            _ => Err(spec_err(k, s, "unknown weight")),
        }
    }
}

impl WeightSpec {
    /// Shadow weights need the sequence they shadow.
    pub fn build(&self, seq: Option<&GeneratedSequence>) -> Result<ArcWeight> {
        match self {
            WeightSpec::Constant(c) => Ok(ArcWeight::constant(*c)),
            WeightSpec::Indicator { fraction, value } => {
                if !(*fraction > 0.0 && *fraction <= 1.0) {
                    return Err(spec_err("weight", &format!("indicator:{fraction}"), "fraction must lie in (0,1]"));
                }
                Ok(ArcWeight::indicator(0.0, TAU * fraction, *value))
            }
            WeightSpec::Arcs(a) => Ok(ArcWeight::from_arcs(a)),
            WeightSpec::Shadow { c0, c } => {
                let seq = seq.ok_or_else(|| spec_err("weight", "shadow", "needs a generator"))?;
                shadow_weight(seq, *c0, *c)
            }
        }
    }
}

/// `8..14` (inclusive), `8,10,12` or `8`.
pub fn parse_range(s: &str) -> Result<Vec<u32>> {
    let bad = |r: &str| spec_err("range", s, r);
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: u32 = a.trim().parse().map_err(|_| bad("start is not an integer"))?;
        let b: u32 = b.trim().parse().map_err(|_| bad("end is not an integer"))?;
        if a > b {
            return Err(bad("empty range"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad("expected integers"))).collect()
}

/// `re,im,mass;re,im,mass;...`
pub fn parse_measure(s: &str) -> Result<DiscreteMeasure> {
    let mut atoms = Vec::new();
    let mut masses = Vec::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let v = numbers("measure", s, part, 3)?;
        atoms.push(DiskPoint::new(v[0], v[1])?);
        masses.push(v[2]);
    }
    if atoms.is_empty() {
        return Err(spec_err("measure", s, "no atoms"));
    }
    DiscreteMeasure::new(atoms, masses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_round_trip() {
        for s in ["radial:0.5,30", "section6:1,12", "pairs:20:radial:0.5,4", "points:0.1,0.2;-0.3,0"] {
            let g: GeneratorSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
            assert!(g.build().is_ok());
        }
        assert!("radial:0.5".parse::<GeneratorSpec>().is_err());
        assert!("radial:0.5,2.5".parse::<GeneratorSpec>().is_err());
        assert!("spiral:1,2".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn weights_and_ranges() {
        let w = "indicator:0.25".parse::<WeightSpec>().unwrap().build(None).unwrap();
        assert!((w.mean() - 0.25).abs() < 1e-15);
        assert!("shadow:1,3".parse::<WeightSpec>().unwrap().build(None).is_err());
        assert_eq!(parse_range("8..11").unwrap(), vec![8, 9, 10, 11]);
        assert_eq!(parse_range("8..=9").unwrap(), vec![8, 9]);
        assert_eq!(parse_range("3,5").unwrap(), vec![3, 5]);
        assert!(parse_range("9..8").is_err());
        let m = parse_measure("0.1,0,1;0,0.5,2").unwrap();
        assert_eq!(m.atoms.len(), 2);
        assert!(parse_measure("2,0,1").is_err());
    }
}
