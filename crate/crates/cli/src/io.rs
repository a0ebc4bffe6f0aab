//! Matrix and representation files.
//!
//! Plain: first line `n`, then `n` whitespace-separated rows. JSON mirrors the
//! plain fields (`{"n": .., "rows": [[..], ..]}`). Input format is sniffed
//! from the first non-blank character.

use std::fmt::Write as _;

use hadamat::filtered::{FilteredLayer, FilteredRep, Filtration, Partition, SfmLayer, SfmRep};
use hadamat::{Matrix, Vector};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: {msg}")]
    Plain { line: usize, msg: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix is not square: {0}")]
    NotSquare(String),
    #[error("invalid representation: {0}")]
    Rep(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Plain,
}

/// Shortest digits are not enough for the determinism contract, so every
/// real is written with 17 significant digits and trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mant = trim_zeros(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    rows: Vec<Vec<f64>>,
}

pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Err(ParseError::Empty);
    }
    if trimmed.starts_with('{') {
        let m: JsonMatrix = serde_json::from_str(trimmed)?;
        return build(m.n, m.rows);
    }
    parse_plain(text)
}

fn parse_plain(text: &str) -> Result<Matrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, first) = lines.next().ok_or(ParseError::Empty)?;
    let n: usize = first.parse().map_err(|_| ParseError::Plain {
        line,
        msg: format!("expected the dimension, got {first:?}"),
    })?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        let row = l
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| ParseError::Plain {
                    line,
                    msg: format!("not a number: {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    build(n, rows)
}

fn build(n: usize, rows: Vec<Vec<f64>>) -> Result<Matrix, ParseError> {
    if rows.len() != n {
        return Err(ParseError::NotSquare(format!("declared n = {n}, found {} rows", rows.len())));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(ParseError::NotSquare(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ParseError::Plain { line: 0, msg: "non-finite entry".into() });
    }
    Matrix::from_rows(&rows).map_err(|e| ParseError::NotSquare(e.to_string()))
}

pub fn render_matrix(m: &Matrix, format: Format) -> String {
    match format {
        Format::Plain => {
            let mut out = format!("{}\n", m.n());
            for row in m.rows() {
                let cells: Vec<String> = row.iter().map(|&x| fmt_real(x)).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
            out
        }
        Format::Json => {
            let rows: Vec<String> = m
                .rows()
                .map(|r| format!("[{}]", r.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(", ")))
                .collect();
            format!("{{\"n\": {}, \"rows\": [{}]}}\n", m.n(), rows.join(", "))
        }
    }
}

/// One SFM level: the partition `ℛ_s` and the un-normalized factors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SfmLevelFile {
    pub atoms: Vec<Vec<usize>>,
    pub c: Vector,
    pub gamma: Vector,
    pub p: Vector,
    pub q: Vector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredLayerFile {
    pub atoms: Vec<Vec<usize>>,
    pub a: Vector,
    pub b: Vector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SfmFile {
    pub n: usize,
    pub levels: Vec<SfmLevelFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredFile {
    pub n: usize,
    pub layers: Vec<FilteredLayerFile>,
}

/// Representation file, tagged by a top-level `"kind"`. Atom indices are
/// 0-based.
#[derive(Debug, Clone)]
pub enum RepFile {
    Sfm(SfmFile),
    Filtered(FilteredFile),
}

#[derive(Debug, Clone)]
pub enum Rep {
    Sfm(SfmRep),
    Filtered(FilteredRep),
}

impl Rep {
    pub fn n(&self) -> usize {
        match self {
            Rep::Sfm(r) => r.n(),
            Rep::Filtered(r) => r.n(),
        }
    }

    pub fn materialize(&self) -> Matrix {
        match self {
            Rep::Sfm(r) => r.materialize(),
            Rep::Filtered(r) => r.materialize(),
        }
    }
}

fn rep_err(e: impl std::fmt::Display) -> ParseError {
    ParseError::Rep(e.to_string())
}

pub fn parse_rep(text: &str) -> Result<Rep, ParseError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let file = match value.get("kind").and_then(|k| k.as_str()) {
        Some("sfm") => RepFile::Sfm(serde_json::from_value(value)?),
        Some("filtered") => RepFile::Filtered(serde_json::from_value(value)?),
        other => return Err(ParseError::Rep(format!("kind must be \"sfm\" or \"filtered\", got {other:?}"))),
    };
    match file {
        RepFile::Sfm(SfmFile { n, levels }) => {
            let parts = levels
                .iter()
                .map(|l| Partition::new(n, l.atoms.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(rep_err)?;
            let filtration = Filtration::new(parts).map_err(rep_err)?;
            let layers = levels
                .into_iter()
                .map(|l| SfmLayer { c: l.c, gamma: l.gamma, p: l.p, q: l.q })
                .collect();
            Ok(Rep::Sfm(SfmRep::new(filtration, layers).map_err(rep_err)?))
        }
        RepFile::Filtered(FilteredFile { n, layers }) => {
            let layers = layers
                .into_iter()
                .map(|l| Ok(FilteredLayer::new(Partition::new(n, l.atoms).map_err(rep_err)?, l.a, l.b)))
                .collect::<Result<Vec<_>, ParseError>>()?;
            let rep = FilteredRep::new(layers).map_err(rep_err)?;
            if rep.n() != n {
                return Err(ParseError::Rep(format!("declared n = {n}, layers have {}", rep.n())));
            }
            Ok(Rep::Filtered(rep))
        }
    }
}

pub fn rep_file(rep: &Rep) -> RepFile {
    match rep {
        Rep::Sfm(r) => RepFile::Sfm(SfmFile {
            n: r.n(),
            levels: r
                .filtration()
                .partitions()
                .iter()
                .zip(r.layers())
                .map(|(p, l)| SfmLevelFile {
                    atoms: p.atoms().to_vec(),
                    c: l.c.clone(),
                    gamma: l.gamma.clone(),
                    p: l.p.clone(),
                    q: l.q.clone(),
                })
                .collect(),
        }),
        Rep::Filtered(r) => RepFile::Filtered(FilteredFile {
            n: r.n(),
            layers: r
                .layers()
                .iter()
                .map(|l| FilteredLayerFile {
                    atoms: l.partition.atoms().to_vec(),
                    a: l.a.clone(),
                    b: l.b.clone(),
                })
                .collect(),
        }),
    }
}

pub fn render_rep(rep: &Rep) -> String {
    let (kind, mut value) = match rep_file(rep) {
        RepFile::Sfm(f) => ("sfm", serde_json::to_value(f)),
        RepFile::Filtered(f) => ("filtered", serde_json::to_value(f)),
    };
    let value = value.as_mut().expect("serializable");
    value
        .as_object_mut()
        .expect("struct")
        .insert("kind".into(), serde_json::Value::String(kind.into()));
    crate::render::to_pretty(&crate::render::normalize_numbers(value.take()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(-2.0), "-2");
        assert_eq!(fmt_real(0.1), "0.10000000000000001");
        assert_eq!(fmt_real(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_real(1e-20), "9.9999999999999995e-21");
        assert_eq!(fmt_real(123456.0), "123456");
    }

    #[test]
    fn real_round_trip() {
        let xs = [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 5e-324, 1.7976931348623157e308, -7.25e12, 1e17, 99999.99999999999];
        for x in xs {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn plain_and_json_round_trip() {
        let m = Matrix::from_rows(&[[0.1, 1.0 / 3.0], [2.0f64.sqrt(), 1e-17]]).unwrap();
        for f in [Format::Plain, Format::Json] {
            let back = parse_matrix(&render_matrix(&m, f)).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn plain_errors() {
        assert!(matches!(parse_matrix(""), Err(ParseError::Empty)));
        assert!(matches!(parse_matrix("2\n1 2\n3\n"), Err(ParseError::NotSquare(_))));
        assert!(matches!(parse_matrix("2\n1 2\n"), Err(ParseError::NotSquare(_))));
        assert!(matches!(parse_matrix("x\n"), Err(ParseError::Plain { line: 1, .. })));
        assert!(matches!(parse_matrix("1\nfoo\n"), Err(ParseError::Plain { line: 2, .. })));
        assert!(matches!(parse_matrix("{\"n\": 1}"), Err(ParseError::Json(_))));
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_matrix("# a comment\n\n2\n1 0\n\n0 1\n").unwrap();
        assert_eq!(m, Matrix::identity(2));
    }

    #[test]
    fn rep_round_trip() {
        let f = Filtration::new(vec![Partition::trivial(3), Partition::discrete(3)]).unwrap();
        let sfm = SfmRep::new(
            f,
            vec![
                SfmLayer { c: vec![0.5; 3], gamma: vec![0.25; 3], p: vec![0.0, 1.0, 1.0], q: vec![1.0, 0.0, 0.0] },
                SfmLayer::pure(vec![1.0, 2.0, 3.0]),
            ],
        )
        .unwrap();
        let rep = Rep::Sfm(sfm.clone());
        let back = parse_rep(&render_rep(&rep)).unwrap();
        assert_eq!(back.materialize(), sfm.materialize());

        let filt = Rep::Filtered(sfm.to_filtered());
        let back = parse_rep(&render_rep(&filt)).unwrap();
        assert_eq!(back.materialize(), filt.materialize());
    }

    #[test]
    fn bad_rep_rejected() {
        let text = r#"{"kind": "sfm", "n": 2, "levels": [{"atoms": [[0]], "c": [1,1], "gamma": [0,0], "p": [1,1], "q": [0,0]}]}"#;
        assert!(matches!(parse_rep(text), Err(ParseError::Rep(_))));
    }
}
