//! JSON and CSV formats. Rationals are `"num/den"` strings, floats are
//! plain decimals with 17 significant digits.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Number, Value};

use crate::cluster::{ClusterSeed, SeedTag};
use crate::coxeter::{CoxeterPair, FactorParams};
use crate::error::{CoxError, Result};
use crate::linalg::{parse_rat, Rat, RatMatrix};
use crate::network::{IntMatrix, PlanarNetwork};
use crate::toda::{hamiltonian_fk, FlowState};
use crate::weyl::{MomentSeq, WeylFunction};

pub fn rat_str(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_strs(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_str).collect()
}

pub fn parse_rats(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s)).collect()
}

/// Decimal notation with exactly 17 significant digits, which round-trips
/// every finite `f64`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("integer exponent");
    let sign = if mant.starts_with('-') { "-" } else { "" };
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp >= 16 {
        format!("{}{}.0", digits, "0".repeat((exp - 16) as usize))
    } else {
        let k = exp as usize + 1;
        format!("{}.{}", &digits[..k], &digits[k..])
    };
    format!("{sign}{body}")
}

/// A JSON number carrying the 17-digit rendering; non-finite values become
/// `null`.
pub fn float_value(x: f64) -> Value {
    match Number::from_str(&fmt17(x)) {
        Ok(n) if x.is_finite() => Value::Number(n),
        _ => Value::Null,
    }
}

pub fn floats_value(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| float_value(*x)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub n: usize,
    #[serde(rename = "Iplus")]
    pub iplus: Vec<usize>,
    #[serde(rename = "Iminus")]
    pub iminus: Vec<usize>,
}

impl PairJson {
    pub fn to_pair(&self) -> Result<CoxeterPair> {
        CoxeterPair::from_sets(self.n, self.iplus.clone(), self.iminus.clone())
    }
}

impl From<&CoxeterPair> for PairJson {
    fn from(p: &CoxeterPair) -> Self {
        PairJson { n: p.n(), iplus: p.iplus().to_vec(), iminus: p.iminus().to_vec() }
    }
}

/// Full parameters, or reduced ones via `c` alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub d: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cplus: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cminus: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<String>>,
}

impl ParamsJson {
    pub fn to_params(&self) -> Result<FactorParams> {
        let d = parse_rats(&self.d)?;
        match (&self.cplus, &self.cminus, &self.c) {
            (Some(p), Some(m), None) => FactorParams::new(d, parse_rats(p)?, parse_rats(m)?),
            (None, None, Some(c)) => FactorParams::reduced(d, parse_rats(c)?),
            _ => Err(CoxError::Argument("params need either cplus and cminus, or c".into())),
        }
    }
}

impl From<&FactorParams> for ParamsJson {
    fn from(p: &FactorParams) -> Self {
        ParamsJson { d: rat_strs(&p.d), cplus: Some(rat_strs(&p.c_plus)), cminus: Some(rat_strs(&p.c_minus)), c: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylJson {
    #[serde(rename = "P")]
    pub p: Vec<String>,
    #[serde(rename = "Q")]
    pub q: Vec<String>,
}

impl From<&WeylFunction> for WeylJson {
    fn from(w: &WeylFunction) -> Self {
        WeylJson { p: rat_strs(&w.p), q: rat_strs(&w.q) }
    }
}

impl WeylJson {
    pub fn to_weyl(&self) -> Result<WeylFunction> {
        let (p, q) = (parse_rats(&self.p)?, parse_rats(&self.q)?);
        if p.len() < 3 || q.len() + 1 != p.len() {
            return Err(CoxError::Argument("need deg P = n ≥ 2 and n coefficients of Q".into()));
        }
        Ok(WeylFunction { p, q })
    }
}

/// Moments `H_0 … H_{2n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentsJson {
    #[serde(rename = "H")]
    pub h: Vec<String>,
}

impl MomentsJson {
    pub fn from_seq(m: &MomentSeq<Rat>) -> Result<Self> {
        let n = m.n() as i64;
        Ok(MomentsJson { h: rat_strs(&m.big_h_range(0, 2 * n - 1)?) })
    }

    pub fn to_seq(&self) -> Result<MomentSeq<Rat>> {
        MomentSeq::from_moments(&parse_rats(&self.h)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedJson {
    pub x: Vec<String>,
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<u8>>,
    #[serde(default)]
    pub shift: i64,
}

impl From<&ClusterSeed> for SeedJson {
    fn from(s: &ClusterSeed) -> Self {
        SeedJson {
            x: rat_strs(&s.x),
            b: s.b.clone(),
            eps: s.tag.as_ref().map(|t| t.eps.clone()),
            shift: s.tag.as_ref().map_or(0, |t| t.shift),
        }
    }
}

impl SeedJson {
    pub fn to_seed(&self) -> Result<ClusterSeed> {
        let tag = self.eps.clone().map(|eps| SeedTag { eps, shift: self.shift });
        ClusterSeed::new(parse_rats(&self.x)?, self.b.clone(), tag)
    }
}

pub fn matrix_json(m: &RatMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| rat_strs(r)).collect()
}

pub fn matrix_from_json(rows: &[Vec<String>]) -> Result<RatMatrix> {
    RatMatrix::from_rows(rows.iter().map(|r| parse_rats(r)).collect::<Result<_>>()?)
}

pub fn network_json(net: &PlanarNetwork) -> Value {
    let vertices: Vec<Value> = net
        .vertices
        .iter()
        .enumerate()
        .map(|(id, v)| json!({"id": id, "level": v.level, "column": v.column, "color": v.color}))
        .collect();
    let edges: Vec<Value> =
        net.edges.iter().map(|e| json!({"from": e.from, "to": e.to, "weight": rat_str(&e.weight)})).collect();
    json!({"n": net.n, "vertices": vertices, "edges": edges, "sources": net.sources, "sinks": net.sinks})
}

/// Parses JSON with the error mapped to an argument error.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CoxError::Argument(format!("malformed JSON: {e}")))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoxError::Argument(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text)
}

pub fn csv_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..n).map(|i| format!("c{i}")));
    h.extend((1..=n).map(|i| format!("d{i}")));
    h.extend((1..n).map(|j| format!("F{j}")));
    h.push("detX".into());
    h
}

/// One row per state: `t, c, d, F_1 … F_{n−1}, det X`.
pub fn write_trajectory_csv<W: Write>(pair: &CoxeterPair, states: &[FlowState], out: W) -> Result<()> {
    let io = |e: csv::Error| CoxError::Argument(format!("CSV output failed: {e}"));
    let n = pair.n();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(n)).map_err(io)?;
    for s in states {
        let mut row = vec![s.t];
        row.extend(&s.c);
        row.extend(&s.d);
        for j in 1..n as u32 {
            row.push(hamiltonian_fk(pair, s, j)?);
        }
        row.push(s.matrix(pair).det()?);
        w.write_record(row.iter().map(|x| fmt17(*x))).map_err(io)?;
    }
    w.flush().map_err(|e| CoxError::Argument(format!("CSV output failed: {e}")))?;
    Ok(())
}

pub fn trajectory_json(pair: &CoxeterPair, states: &[FlowState]) -> Result<Value> {
    let n = pair.n();
    let rows = states
        .iter()
        .map(|s| {
            let f = (1..n as u32).map(|j| hamiltonian_fk(pair, s, j)).collect::<Result<Vec<_>>>()?;
            Ok(json!({
                "t": float_value(s.t),
                "c": floats_value(&s.c),
                "d": floats_value(&s.d),
                "F": floats_value(&f),
                "detX": float_value(s.matrix(pair).det()?),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"pair": PairJson::from(pair), "states": rows}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn fmt17_round_trips() {
        for x in [1.0, -0.1, 1e-20, 123456.789, 6.02e23, -2.5e-3, std::f64::consts::PI, f64::MIN_POSITIVE] {
            let s = fmt17(x);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let sig: String = s.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).collect();
            assert!(sig.len() >= 17, "{s}");
        }
        assert_eq!(fmt17(1.0), "1.0000000000000000");
        assert_eq!(fmt17(-0.5), "-0.50000000000000000");
        assert_eq!(float_value(0.1).to_string(), "0.10000000000000001");
    }

    #[test]
    fn pair_and_params_round_trip() {
        let text = r#"{"n": 3, "Iplus": [1, 3], "Iminus": [1, 2, 3]}"#;
        let pj: PairJson = from_json(text).unwrap();
        let pair = pj.to_pair().unwrap();
        assert_eq!(PairJson::from(&pair), pj);
        let p = FactorParams::new(vec![rat(1, 2), rat(-3, 1), rat(2, 7)], vec![rat(1, 1); 2], vec![rat(5, 3), rat(-1, 4)])
            .unwrap();
        let s = serde_json::to_string(&ParamsJson::from(&p)).unwrap();
        assert!(s.contains("\"1/2\"") && s.contains("\"-3\""));
        assert_eq!(from_json::<ParamsJson>(&s).unwrap().to_params().unwrap(), p);
        let red: ParamsJson = from_json(r#"{"d": ["1","2","3"], "c": ["1/2","2"]}"#).unwrap();
        assert_eq!(red.to_params().unwrap().c_minus, vec![rat(1, 2), rat(2, 1)]);
        assert!(from_json::<ParamsJson>("{").is_err());
        let bad: ParamsJson = from_json(r#"{"d": ["1","2"], "cplus": ["1"]}"#).unwrap();
        assert!(bad.to_params().is_err());
    }

    #[test]
    fn csv_header_layout() {
        assert_eq!(csv_header(3).join(","), "t,c1,c2,d1,d2,d3,F1,F2,detX");
    }
}
