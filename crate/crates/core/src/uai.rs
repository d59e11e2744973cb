//! UAI model and evidence files, conditioning on evidence, and the result
//! line / CSV trace formats shared by every solver.
//!
//! Both `MARKOV` and `BAYES` tables are read as nonnegative reals and stored
//! as natural logs; zero entries become [`LOG_FLOOR`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::factor::{Factor, LOG_FLOOR};
use crate::model::{GraphicalModel, VarId};

struct Tokens<'a> {
    items: Vec<(&'a str, usize)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (t, i + 1)))
            .collect();
        Tokens {
            items,
            pos: 0,
            last_line: text.lines().count().max(1),
        }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .map(|t| t.1)
            .unwrap_or(self.last_line)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line(),
            msg: msg.into(),
        })
    }

    fn next(&mut self, what: &str) -> Result<(&'a str, usize)> {
        match self.items.get(self.pos) {
            Some(&t) => {
                self.pos += 1;
                Ok(t)
            }
            None => self.err(format!("unexpected end of input, expected {what}")),
        }
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let (tok, line) = self.next(what)?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, found `{tok}`"),
        })
    }

    fn f64(&mut self, what: &str) -> Result<(f64, usize)> {
        let (tok, line) = self.next(what)?;
        let v: f64 = tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, found `{tok}`"),
        })?;
        Ok((v, line))
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.items.len() {
            return self.err(format!("trailing token `{}`", self.items[self.pos].0));
        }
        Ok(())
    }
}

fn to_log(p: f64) -> f64 {
    if p == 0.0 {
        LOG_FLOOR
    } else {
        p.ln()
    }
}

/// Parses a `.uai` model.
pub fn parse_uai(text: &str) -> Result<GraphicalModel> {
    let mut t = Tokens::new(text);
    let (header, _) = t.next("model type")?;
    if header != "MARKOV" && header != "BAYES" {
        t.pos -= 1;
        return t.err(format!("unknown model type `{header}`"));
    }
    let n = t.usize("variable count")?;
    let mut cards = Vec::with_capacity(n);
    for i in 0..n {
        let c = t.usize("cardinality")?;
        if c == 0 {
            t.pos -= 1;
            return t.err(format!("variable {i} has cardinality 0"));
        }
        cards.push(c);
    }
    let nf = t.usize("factor count")?;
    let mut scopes = Vec::with_capacity(nf);
    for _ in 0..nf {
        let arity = t.usize("factor arity")?;
        let mut scope = Vec::with_capacity(arity);
        for _ in 0..arity {
            let v = t.usize("variable id")?;
            if v >= n {
                t.pos -= 1;
                return t.err(format!("variable id {v} out of range (n = {n})"));
            }
            if scope.contains(&v) {
                t.pos -= 1;
                return t.err(format!("variable {v} repeated in a factor scope"));
            }
            scope.push(v);
        }
        scopes.push(scope);
    }
    let mut factors = Vec::with_capacity(nf);
    for (fi, scope) in scopes.iter().enumerate() {
        let fcards: Vec<usize> = scope.iter().map(|&v| cards[v]).collect();
        let expected: usize = fcards.iter().product();
        let count = t.usize("table entry count")?;
        if count != expected {
            t.pos -= 1;
            return t.err(format!(
                "factor {fi} declares {count} entries, its scope needs {expected}"
            ));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let (p, line) = t.f64("table entry")?;
            if p.is_nan() || p < 0.0 || p.is_infinite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("table entry {p} is not a finite nonnegative number"),
                });
            }
            values.push(to_log(p));
        }
        factors.push(Factor::from_table(scope, &fcards, values)?);
    }
    t.finish()?;
    GraphicalModel::new(cards, factors)
}

/// Writes a model as a `MARKOV` file (tables exponentiated back from logs).
pub fn write_uai(m: &GraphicalModel) -> String {
    let mut s = String::new();
    s.push_str("MARKOV\n");
    let _ = writeln!(s, "{}", m.num_vars());
    let cards: Vec<String> = m.cards().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "{}", cards.join(" "));
    let _ = writeln!(s, "{}", m.factors().len());
    for f in m.factors() {
        let mut line = f.arity().to_string();
        for v in f.scope() {
            let _ = write!(line, " {v}");
        }
        let _ = writeln!(s, "{line}");
    }
    for f in m.factors() {
        let _ = writeln!(s, "\n{}", f.len());
        let vals: Vec<String> = f
            .values()
            .iter()
            .map(|&v| {
                if v <= LOG_FLOOR {
                    "0".to_string()
                } else {
                    format!("{}", v.exp())
                }
            })
            .collect();
        let _ = writeln!(s, " {}", vals.join(" "));
    }
    s
}

/// Observed values keyed by variable id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvidenceSet {
    observed: BTreeMap<VarId, usize>,
}

impl EvidenceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VarId, value: usize) -> Option<usize> {
        self.observed.insert(v, value)
    }

    pub fn get(&self, v: VarId) -> Option<usize> {
        self.observed.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.observed.iter().map(|(&v, &x)| (v, x))
    }

    /// Checks ids and values against a model.
    pub fn validate(&self, m: &GraphicalModel) -> Result<()> {
        for (v, x) in self.iter() {
            if v >= m.num_vars() {
                return Err(Error::Usage(format!(
                    "evidence variable {v} does not exist"
                )));
            }
            if x >= m.card(v) {
                return Err(Error::Usage(format!(
                    "evidence value {x} out of range for variable {v}"
                )));
            }
        }
        Ok(())
    }

    /// Original ids of the variables that survive conditioning, ascending;
    /// position `i` holds the original id of conditioned variable `i`.
    pub fn kept_variables(&self, num_vars: usize) -> Vec<VarId> {
        (0..num_vars)
            .filter(|v| !self.observed.contains_key(v))
            .collect()
    }
}

/// Parses an evidence file: a count `k` followed by `k` `var value` pairs.
pub fn parse_evidence(text: &str) -> Result<EvidenceSet> {
    let mut t = Tokens::new(text);
    let k = t.usize("evidence count")?;
    let mut e = EvidenceSet::new();
    for _ in 0..k {
        let line = t.line();
        let v = t.usize("evidence variable")?;
        let x = t.usize("evidence value")?;
        if e.insert(v, x).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("variable {v} observed twice"),
            });
        }
    }
    t.finish()?;
    Ok(e)
}

/// Parses evidence and range-checks it against `m`, reporting violations as
/// parse errors.
pub fn parse_evidence_for(text: &str, m: &GraphicalModel) -> Result<EvidenceSet> {
    let e = parse_evidence(text)?;
    e.validate(m).map_err(|err| Error::Parse {
        line: 1,
        msg: err.to_string(),
    })?;
    Ok(e)
}

/// Slices every factor at the observed values and drops evidence variables,
/// renumbering the rest densely in ascending order.
pub fn condition(m: &GraphicalModel, e: &EvidenceSet) -> Result<GraphicalModel> {
    e.validate(m)?;
    if e.is_empty() {
        return Ok(m.clone());
    }
    let kept = e.kept_variables(m.num_vars());
    let mut new_id = vec![usize::MAX; m.num_vars()];
    for (i, &v) in kept.iter().enumerate() {
        new_id[v] = i;
    }
    let mut factors = Vec::with_capacity(m.factors().len());
    for f in m.factors() {
        let mut g = f.clone();
        for &v in f.scope() {
            if let Some(x) = e.get(v) {
                g = g.slice(v, x)?;
            }
        }
        factors.push(g.relabel_monotone(|v| new_id[v]));
    }
    let cards = kept.iter().map(|&v| m.card(v)).collect();
    GraphicalModel::new(cards, factors)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultKind {
    Exact,
    Bound,
}

/// `STATUS <exact|bound> LN <v> LOG10 <v/ln10>`
pub fn result_line(kind: ResultKind, value_ln: f64) -> String {
    let kind = match kind {
        ResultKind::Exact => "exact",
        ResultKind::Bound => "bound",
    };
    format!(
        "STATUS {kind} LN {} LOG10 {}",
        fmt_value(value_ln),
        fmt_value(value_ln / std::f64::consts::LN_10)
    )
}

/// Fixed six-decimal rendering used by every result line.
pub fn fmt_value(v: f64) -> String {
    if v <= LOG_FLOOR {
        "-inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

/// Writes an anytime trace as CSV with header `elapsed_seconds,<value_column>`.
pub fn write_trace_csv<W: Write>(
    out: W,
    value_column: &str,
    points: impl IntoIterator<Item = (f64, f64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["elapsed_seconds", value_column])
        .map_err(csv_err)?;
    for (t, v) in points {
        w.write_record([format!("{t:.6}"), format!("{v:.9}")])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Usage(format!("csv: {other:?}")),
    }
}
