//! Line-oriented `.qcp.txt` interchange format.
//!
//! ```text
//! kconn-qcp 1
//! param n 3
//! param dim 2
//! param k 2
//! param h 1
//! param big_m 49
//! origin 1 1 0            # robot index, then dim coordinates
//! objective min zstar
//! variables 49
//! var e_0_1 binary 0 1    # name, kind, lower, upper
//! constraints 75
//! con move 1 | lin x_1_0 -2 zstar -1 | quad x_1_0 x_1_0 1 x_1_1 x_1_1 1 | <= -1
//! end
//! ```
//!
//! Floats use the shortest representation that parses back to the same
//! value, so export followed by parse reproduces the model exactly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{Constraint, Family, QcpModel, Sense, VarKind, Variable};
use crate::error::{Error, Result};
use crate::geom::Point;

const MAGIC: &str = "kconn-qcp 1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExportFormat {
    #[default]
    Text,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "qcp" | "qcp.txt" => Ok(ExportFormat::Text),
            other => Err(Error::InvalidArgument(format!("unsupported export format `{other}`"))),
        }
    }
}

/// Serializes the model. Output is byte-identical for identical models.
pub fn export_qcp(model: &QcpModel, format: ExportFormat) -> String {
    match format {
        ExportFormat::Text => export_text(model),
    }
}

fn export_text(model: &QcpModel) -> String {
    let mut out = String::new();
    let names: Vec<&str> = model.variables.iter().map(|v| v.name.as_str()).collect();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "param n {}", model.n).unwrap();
    writeln!(out, "param dim {}", model.dim).unwrap();
    writeln!(out, "param k {}", model.k).unwrap();
    writeln!(out, "param h {}", model.h).unwrap();
    writeln!(out, "param big_m {}", model.big_m).unwrap();
    for (i, p) in model.origin.iter().enumerate() {
        write!(out, "origin {i}").unwrap();
        for c in p.coords(model.dim) {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "objective min {}", names[model.zstar_var()]).unwrap();
    writeln!(out, "variables {}", model.variables.len()).unwrap();
    for v in &model.variables {
        let kind = match v.kind {
            VarKind::Binary => "binary",
            VarKind::Continuous => "continuous",
        };
        writeln!(out, "var {} {kind} {} {}", v.name, v.lower, v.upper).unwrap();
    }
    writeln!(out, "constraints {}", model.constraints.len()).unwrap();
    for c in &model.constraints {
        let idx: Vec<String> = c.indices.iter().map(usize::to_string).collect();
        write!(out, "con {} {} | lin", c.family.tag(), idx.join(",")).unwrap();
        for &(v, coef) in &c.linear {
            write!(out, " {} {coef}", names[v]).unwrap();
        }
        out.push_str(" | quad");
        for &(a, b, coef) in &c.quadratic {
            write!(out, " {} {} {coef}", names[a], names[b]).unwrap();
        }
        writeln!(out, " | {} {}", c.sense.symbol(), c.rhs).unwrap();
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn keyed<'b>(&self, line: &'b str, key: &str) -> Result<Vec<&'b str>> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(parts.collect())
    }

    fn num<T: FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }
}

/// Parses the output of [`export_qcp`].
pub fn parse_qcp(text: &str) -> Result<QcpModel> {
    let mut lines = Lines { inner: text.lines().enumerate(), line: 0 };
    if lines.next()? != MAGIC {
        return Err(lines.err("missing header"));
    }
    let mut param = |key: &str| -> Result<String> {
        let l = lines.next()?;
        let parts = lines.keyed(l, "param")?;
        match parts.as_slice() {
            [k, v] if *k == key => Ok(v.to_string()),
            _ => Err(lines.err(format!("expected `param {key}`"))),
        }
    };
    let n: usize = param("n")?.parse().map_err(|_| Error::Parse { line: 2, msg: "bad n".into() })?;
    let dim: usize = param("dim")?.parse().map_err(|_| Error::Parse { line: 3, msg: "bad dim".into() })?;
    let k: usize = param("k")?.parse().map_err(|_| Error::Parse { line: 4, msg: "bad k".into() })?;
    let h: f64 = param("h")?.parse().map_err(|_| Error::Parse { line: 5, msg: "bad h".into() })?;
    let big_m: f64 = param("big_m")?.parse().map_err(|_| Error::Parse { line: 6, msg: "bad big_m".into() })?;
    if !(dim == 2 || dim == 3) || n < 2 {
        return Err(Error::Parse { line: 3, msg: format!("unsupported sizes n = {n}, dim = {dim}") });
    }

    let mut origin = Vec::with_capacity(n);
    for i in 0..n {
        let l = lines.next()?;
        let parts = lines.keyed(l, "origin")?;
        if parts.len() != dim + 1 || lines.num::<usize>(parts[0])? != i {
            return Err(lines.err(format!("malformed origin for robot {i}")));
        }
        let coords = parts[1..].iter().map(|s| lines.num::<f64>(s)).collect::<Result<Vec<_>>>()?;
        origin.push(Point::from_slice(&coords).ok_or_else(|| lines.err("bad origin"))?);
    }

    let l = lines.next()?;
    let objective = lines.keyed(l, "objective")?;
    let (obj_sense, obj_name) = match objective.as_slice() {
        [s, name] => (*s, name.to_string()),
        _ => return Err(lines.err("malformed objective")),
    };
    if obj_sense != "min" {
        return Err(lines.err("only minimization is supported"));
    }

    let l = lines.next()?;
    let count = match lines.keyed(l, "variables")?.as_slice() {
        [c] => lines.num::<usize>(c)?,
        _ => return Err(lines.err("malformed variable count")),
    };
    let mut variables = Vec::with_capacity(count);
    let mut by_name = HashMap::with_capacity(count);
    for idx in 0..count {
        let l = lines.next()?;
        let parts = lines.keyed(l, "var")?;
        let [name, kind, lower, upper] = parts.as_slice() else {
            return Err(lines.err("malformed variable"));
        };
        let kind = match *kind {
            "binary" => VarKind::Binary,
            "continuous" => VarKind::Continuous,
            other => return Err(lines.err(format!("unknown variable kind `{other}`"))),
        };
        if by_name.insert(name.to_string(), idx).is_some() {
            return Err(lines.err(format!("duplicate variable `{name}`")));
        }
        variables.push(Variable { name: name.to_string(), kind, lower: lines.num(lower)?, upper: lines.num(upper)? });
    }
    if by_name.get(&obj_name) != Some(&(count - 1)) {
        return Err(lines.err("objective must be the last variable"));
    }

    let l = lines.next()?;
    let count = match lines.keyed(l, "constraints")?.as_slice() {
        [c] => lines.num::<usize>(c)?,
        _ => return Err(lines.err("malformed constraint count")),
    };
    let var = |lines: &Lines, name: &str| by_name.get(name).copied().ok_or_else(|| lines.err(format!("unknown variable `{name}`")));
    let mut constraints = Vec::with_capacity(count);
    for _ in 0..count {
        let l = lines.next()?;
        let sections: Vec<&str> = l.split('|').map(str::trim).collect();
        let [head, lin, quad, tail] = sections.as_slice() else {
            return Err(lines.err("constraint needs four `|`-separated sections"));
        };
        let head = lines.keyed(head, "con")?;
        let [tag, idx] = head.as_slice() else {
            return Err(lines.err("malformed constraint head"));
        };
        let family = Family::from_tag(tag).ok_or_else(|| lines.err(format!("unknown family `{tag}`")))?;
        let indices = idx.split(',').map(|s| lines.num::<usize>(s)).collect::<Result<Vec<_>>>()?;

        let lin = lines.keyed(lin, "lin")?;
        if lin.len() % 2 != 0 {
            return Err(lines.err("linear terms come in pairs"));
        }
        let linear = lin
            .chunks(2)
            .map(|c| Ok((var(&lines, c[0])?, lines.num::<f64>(c[1])?)))
            .collect::<Result<Vec<_>>>()?;

        let quad = lines.keyed(quad, "quad")?;
        if quad.len() % 3 != 0 {
            return Err(lines.err("quadratic terms come in triples"));
        }
        let quadratic = quad
            .chunks(3)
            .map(|c| Ok((var(&lines, c[0])?, var(&lines, c[1])?, lines.num::<f64>(c[2])?)))
            .collect::<Result<Vec<_>>>()?;

        let tail: Vec<&str> = tail.split_whitespace().collect();
        let [sense, rhs] = tail.as_slice() else {
            return Err(lines.err("malformed constraint sense"));
        };
        let sense = match *sense {
            "<=" => Sense::Le,
            ">=" => Sense::Ge,
            "=" => Sense::Eq,
            other => return Err(lines.err(format!("unknown sense `{other}`"))),
        };
        constraints.push(Constraint { family, indices, linear, quadratic, sense, rhs: lines.num(rhs)? });
    }
    if lines.next()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    Ok(QcpModel { n, dim, h, k, big_m, origin, variables, constraints })
}
