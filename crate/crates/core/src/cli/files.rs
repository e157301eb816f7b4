//! Text formats for vectors, oracle tuples, common randomness, views and
//! transcripts.
//!
//! Vector files:
//!
//! ```text
//! lrs-vec v1 p=11 n=2
//! 2
//! 3
//! ```
//!
//! Keyed files share one layout, a header `<kind> v1 p=<p> n=<n> [extra]`
//! followed by `KEY = c1 c2 ...` lines. Lines starting with `#` and blank
//! lines are ignored everywhere; writers put the run configuration in such a
//! comment.

use std::fmt::Write;

use crate::channel::Message;
use crate::error::{Error, Result};
use crate::field::{FieldParams, FieldVector, NonZeroVector};
use crate::oracle::OracleSample;
use crate::reconstruct::CommonRandomness;
use crate::refresh::{ViewL, ViewR};

use super::config::RunConfig;

pub const VEC_MAGIC: &str = "lrs-vec";
pub const ORACLE_MAGIC: &str = "lrs-oracle";
pub const CR_MAGIC: &str = "lrs-cr";
pub const VIEW_MAGIC: &str = "lrs-view";
pub const TRANSCRIPT_MAGIC: &str = "lrs-transcript";

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Lines that carry content, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - base + 1, t))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub kind: String,
    pub p: u64,
    pub n: usize,
    /// Any further `key=value` fields.
    pub extra: Vec<(String, String)>,
}

fn parse_header(line_no: usize, line: &str, kinds: &[&str]) -> Result<Header> {
    let mut toks = tokens(line);
    let (col, kind) = toks.next().ok_or_else(|| parse_err(line_no, 1, "missing header"))?;
    if !kinds.contains(&kind) {
        return Err(parse_err(
            line_no,
            col,
            format!("expected {}, found {kind:?}", kinds.join(" or ")),
        ));
    }
    match toks.next() {
        Some((_, "v1")) => {}
        Some((col, other)) => {
            return Err(parse_err(line_no, col, format!("unsupported version {other:?}")))
        }
        None => return Err(parse_err(line_no, line.len() + 1, "missing version")),
    }
    let (mut p, mut n, mut extra) = (None, None, Vec::new());
    for (col, tok) in toks {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, col, format!("expected key=value, found {tok:?}")))?;
        let vcol = col + k.len() + 1;
        match k {
            "p" => {
                p = Some(v.parse::<u64>().map_err(|_| parse_err(line_no, vcol, "bad modulus"))?)
            }
            "n" => {
                n = Some(v.parse::<usize>().map_err(|_| parse_err(line_no, vcol, "bad dimension"))?)
            }
            _ => extra.push((k.to_owned(), v.to_owned())),
        }
    }
    let end = line.len() + 1;
    Ok(Header {
        kind: kind.to_owned(),
        p: p.ok_or_else(|| parse_err(line_no, end, "header lacks p="))?,
        n: n.ok_or_else(|| parse_err(line_no, end, "header lacks n="))?,
        extra,
    })
}

fn parse_coord(line: usize, col: usize, tok: &str, p: u64) -> Result<u64> {
    let v = tok
        .parse::<u64>()
        .map_err(|_| parse_err(line, col, format!("not a decimal coordinate: {tok:?}")))?;
    if v >= p {
        return Err(parse_err(line, col, format!("coordinate {v} not below p = {p}")));
    }
    Ok(v)
}

/// A parsed vector file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecFile {
    pub p: u64,
    pub n: usize,
    pub values: Vec<u64>,
}

pub fn parse_vector(text: &str) -> Result<VecFile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty vector file"))?;
    let h = parse_header(hl, header, &[VEC_MAGIC])?;
    let mut values = Vec::with_capacity(h.n);
    let mut last = hl;
    for (no, line) in lines {
        let mut toks = tokens(line);
        let (col, tok) = toks.next().expect("content line");
        if let Some((col, _)) = toks.next() {
            return Err(parse_err(no, col, "one coordinate per line"));
        }
        if values.len() == h.n {
            return Err(parse_err(no, col, format!("more than n = {} coordinates", h.n)));
        }
        values.push(parse_coord(no, col, tok, h.p)?);
        last = no;
    }
    if values.len() != h.n {
        return Err(parse_err(
            last + 1,
            1,
            format!("expected {} coordinates, found {}", h.n, values.len()),
        ));
    }
    Ok(VecFile {
        p: h.p,
        n: h.n,
        values,
    })
}

pub fn write_vector(v: &FieldVector, cfg: &RunConfig) -> String {
    let mut s = format!("{VEC_MAGIC} v1 p={} n={}\n{}\n", v.modulus(), v.len(), cfg.comment_line());
    for x in v.values() {
        writeln!(s, "{x}").unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyedEntry {
    pub key: String,
    pub values: Vec<u64>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyedFile {
    pub header: Header,
    pub entries: Vec<KeyedEntry>,
}

pub fn parse_keyed(text: &str, kinds: &[&str]) -> Result<KeyedFile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let header = parse_header(hl, header, kinds)?;
    let mut entries = Vec::new();
    for (no, line) in lines {
        let mut toks = tokens(line);
        let (_, key) = toks.next().expect("content line");
        match toks.next() {
            Some((_, "=")) => {}
            Some((col, _)) => return Err(parse_err(no, col, "expected '='")),
            None => return Err(parse_err(no, line.len() + 1, "expected '='")),
        }
        let values = toks
            .map(|(col, t)| parse_coord(no, col, t, header.p))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != header.n {
            return Err(parse_err(
                no,
                line.len() + 1,
                format!("{key} has {} coordinates, expected n = {}", values.len(), header.n),
            ));
        }
        entries.push(KeyedEntry {
            key: key.to_owned(),
            values,
            line: no,
        });
    }
    Ok(KeyedFile { header, entries })
}

fn check_header(h: &Header, params: FieldParams) -> Result<()> {
    if h.p != params.modulus() || h.n != params.dimension() {
        return Err(Error::ParamsMismatch(format!(
            "{} file has p={} n={}, shares have p={} n={}",
            h.kind,
            h.p,
            h.n,
            params.modulus(),
            params.dimension()
        )));
    }
    Ok(())
}

const ORACLE_KEYS: [&str; 4] = ["A", "A~", "B", "B~"];

/// One or more oracle tuples; each tuple is a block of the four keys
/// `A`, `A~`, `B`, `B~` in any order. Scripted tuples are consumed in file
/// order, one per attempt.
pub fn parse_oracle_file(text: &str, params: FieldParams) -> Result<Vec<OracleSample>> {
    let f = parse_keyed(text, &[ORACLE_MAGIC])?;
    check_header(&f.header, params)?;
    let mut samples = Vec::new();
    let mut block: [Option<FieldVector>; 4] = Default::default();
    let mut last_line = 1;
    for e in &f.entries {
        let slot = ORACLE_KEYS
            .iter()
            .position(|k| *k == e.key)
            .ok_or_else(|| parse_err(e.line, 1, format!("unknown key {:?}", e.key)))?;
        if block[slot].is_some() {
            return Err(parse_err(e.line, 1, format!("{} repeated before the tuple was complete", e.key)));
        }
        block[slot] = Some(params.vector(&e.values)?);
        last_line = e.line;
        if block.iter().all(Option::is_some) {
            let [a, at, b, bt] = std::mem::take(&mut block).map(Option::unwrap);
            samples.push(OracleSample::new(params, a, at, b, bt)?);
        }
    }
    if block.iter().any(Option::is_some) {
        return Err(parse_err(last_line + 1, 1, "incomplete oracle tuple"));
    }
    if samples.is_empty() {
        return Err(parse_err(last_line + 1, 1, "no oracle tuple"));
    }
    Ok(samples)
}

fn find<'a>(f: &'a KeyedFile, key: &str) -> Result<&'a KeyedEntry> {
    let mut it = f.entries.iter().filter(|e| e.key == key);
    let first = it
        .next()
        .ok_or_else(|| parse_err(f.entries.last().map_or(2, |e| e.line + 1), 1, format!("missing {key}")))?;
    if let Some(dup) = it.next() {
        return Err(parse_err(dup.line, 1, format!("duplicate {key}")));
    }
    Ok(first)
}

/// Reads `V` and `V~` from a common-randomness file or a view file.
pub fn parse_cr_file(text: &str, params: FieldParams) -> Result<CommonRandomness> {
    let f = parse_keyed(text, &[CR_MAGIC, VIEW_MAGIC])?;
    check_header(&f.header, params)?;
    let get = |k: &str| -> Result<NonZeroVector> {
        let e = find(&f, k)?;
        NonZeroVector::try_from(params.vector(&e.values)?)
            .map_err(|err| parse_err(e.line, 1, format!("{k}: {err}")))
    };
    Ok(CommonRandomness {
        v: get("V")?,
        v_tilde: get("V~")?,
    })
}

pub fn write_cr(cr: &CommonRandomness, cfg: &RunConfig) -> String {
    keyed(CR_MAGIC, "", cfg, &[("V", &cr.v), ("V~", &cr.v_tilde)])
}

fn keyed(kind: &str, extra: &str, cfg: &RunConfig, entries: &[(&str, &FieldVector)]) -> String {
    let mut s = format!("{kind} v1 p={} n={}{extra}\n{}\n", cfg.p, cfg.n, cfg.comment_line());
    for (k, v) in entries {
        let coords: Vec<String> = v.values().iter().map(u64::to_string).collect();
        writeln!(s, "{k} = {}", coords.join(" ")).unwrap();
    }
    s
}

pub fn write_oracle(sample: &OracleSample, cfg: &RunConfig) -> String {
    keyed(
        ORACLE_MAGIC,
        "",
        cfg,
        &[
            ("A", &sample.a),
            ("A~", &sample.a_tilde),
            ("B", &sample.b),
            ("B~", &sample.b_tilde),
        ],
    )
}

pub fn write_view_l(view: &ViewL, cfg: &RunConfig) -> String {
    keyed(
        VIEW_MAGIC,
        " party=L",
        cfg,
        &[
            ("L", &view.l),
            ("A", &view.a),
            ("V", &view.v),
            ("A~", &view.a_tilde),
            ("V~", &view.v_tilde),
        ],
    )
}

pub fn write_view_r(view: &ViewR, cfg: &RunConfig) -> String {
    keyed(
        VIEW_MAGIC,
        " party=R",
        cfg,
        &[
            ("R", &view.r),
            ("B", &view.b),
            ("V", &view.v),
            ("B~", &view.b_tilde),
            ("V~", &view.v_tilde),
        ],
    )
}

/// Messages of one attempt, `<index> <direction> <coords>` per line.
pub fn write_transcript(messages: &[Message], cfg: &RunConfig) -> String {
    let mut s = format!(
        "{TRANSCRIPT_MAGIC} v1 p={} n={} messages={}\n{}\n",
        cfg.p,
        cfg.n,
        messages.len(),
        cfg.comment_line()
    );
    for (i, m) in messages.iter().enumerate() {
        let coords: Vec<String> = m.payload.values().iter().map(u64::to_string).collect();
        writeln!(s, "{i} {} {}", m.direction, coords.join(" ")).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldMode;

    fn cfg() -> RunConfig {
        RunConfig {
            p: 11,
            n: 2,
            seed: 0,
            mode: FieldMode::Standard,
            trials: 1,
            restart_cap: 1000,
        }
    }

    fn err_pos(r: Result<impl std::fmt::Debug>) -> (usize, usize) {
        match r {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn vector_roundtrip() {
        let k = FieldParams::new(11, 2).unwrap();
        let v = k.vector(&[2, 3]).unwrap();
        let text = write_vector(&v, &cfg());
        assert_eq!(
            text,
            "lrs-vec v1 p=11 n=2\n# run p=11 n=2 seed=0 mode=standard trials=1 restart-cap=1000\n2\n3\n"
        );
        assert_eq!(
            parse_vector(&text).unwrap(),
            VecFile {
                p: 11,
                n: 2,
                values: vec![2, 3]
            }
        );
        assert_eq!(parse_vector("lrs-vec v1 p=11 n=2\n2\n3").unwrap().values, [2, 3]);
    }

    #[test]
    fn vector_errors_carry_positions() {
        assert_eq!(err_pos(parse_vector("")), (1, 1));
        assert_eq!(err_pos(parse_vector("lrs-vex v1 p=11 n=2\n")), (1, 1));
        assert_eq!(err_pos(parse_vector("lrs-vec v2 p=11 n=2\n")), (1, 9));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=x n=2\n")), (1, 14));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 n=2\n1\n1\n")), (1, 15));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=11 n=2\n2\n 12\n")), (3, 2));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=11 n=2\n2\nabc\n")), (3, 1));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=11 n=2\n2 3\n")), (2, 3));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=11 n=2\n2\n")), (3, 1));
        assert_eq!(err_pos(parse_vector("lrs-vec v1 p=11 n=2\n2\n3\n4\n")), (4, 1));
    }

    #[test]
    fn oracle_file_validation() {
        let k = FieldParams::new(11, 2).unwrap();
        let good = "lrs-oracle v1 p=11 n=2\nA = 1 2\nA~ = 2 1\nB = 5 1\nB~ = 1 2\n";
        let s = parse_oracle_file(good, k).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].b.values(), [5, 1]);
        assert_eq!(write_oracle(&s[0], &cfg()).lines().nth(2), Some("A = 1 2"));

        let bad = good.replace("B = 5 1", "B = 5 2");
        assert!(matches!(parse_oracle_file(&bad, k), Err(Error::InvalidOracleSample(_))));
        let zero_a = good.replace("A = 1 2", "A = 0 2");
        assert!(matches!(parse_oracle_file(&zero_a, k), Err(Error::InvalidOracleSample(_))));
        assert_eq!(err_pos(parse_oracle_file(&good.replace("B~ = 1 2\n", ""), k)), (5, 1));
        assert_eq!(err_pos(parse_oracle_file(&good.replace("A~ =", "A ="), k)), (3, 1));
        assert_eq!(err_pos(parse_oracle_file(&good.replace("B = 5 1", "B = 5"), k)), (4, 6));
        assert_eq!(err_pos(parse_oracle_file(&good.replace("B = 5 1", "B : 5 1"), k)), (4, 3));
        let other = FieldParams::new(13, 2).unwrap();
        assert!(matches!(parse_oracle_file(good, other), Err(Error::ParamsMismatch(_))));
    }

    #[test]
    fn cr_from_view_file() {
        let k = FieldParams::new(11, 2).unwrap();
        let view = "lrs-view v1 p=11 n=2 party=L\nL = 2 3\nA = 1 2\nV = 6 8\nA~ = 2 1\nV~ = 5 2\n";
        let cr = parse_cr_file(view, k).unwrap();
        assert_eq!(cr.v.values(), [6, 8]);
        assert_eq!(parse_cr_file(&write_cr(&cr, &cfg()), k).unwrap(), cr);
        assert_eq!(err_pos(parse_cr_file("lrs-cr v1 p=11 n=2\nV = 1 1\n", k)), (3, 1));
        assert_eq!(err_pos(parse_cr_file("lrs-cr v1 p=11 n=2\nV = 1 1\nV~ = 0 1\n", k)), (3, 1));
    }
}
