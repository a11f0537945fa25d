//! Block-structured input files: series registries, admissible maps, blow-ups,
//! and flattening data.
//!
//! Statements end at a newline or `;` (outside parentheses); `name ... { ... }`
//! opens a block; `#` starts a comment. A comment on a `flat` line of the form
//! `# provenance: ...` is kept as the flatness provenance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::flat::{AdmissibleMap, Model, Sign, SpecialSet};
use crate::formula::Formula;
use crate::parse::{parse_formula, parse_point, parse_term, ParseError};
use crate::poly::KPoly;
use crate::scalar::Scalar;
use crate::series::{CoefficientRule, SeriesRegistry, StrictSeries, TailCertificate};
use crate::term::Term;
use crate::transforms::{BlowupSpec, CenterPoint, DatumNode, FinalMap, FlatteningDatum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ParseError },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub line: usize,
    pub text: String,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Stmt(Stmt),
    Block { line: usize, header: String, items: Vec<Item> },
}

/// Splits text into statements and blocks.
pub fn parse_items(text: &str) -> Result<Vec<Item>, FormatError> {
    let mut stack: Vec<(usize, String, Vec<Item>)> = vec![(0, String::new(), Vec::new())];
    let mut cur = String::new();
    let mut cur_line = 1;
    let mut line = 1;
    let mut depth = 0i32;
    let mut chars = text.chars().peekable();

    fn flush(cur: &mut String, cur_line: usize, comment: Option<String>, items: &mut Vec<Item>) {
        let t = cur.trim();
        if !t.is_empty() {
            items.push(Item::Stmt(Stmt {
                line: cur_line,
                text: t.to_string(),
                comment,
            }));
        }
        cur.clear();
    }

    while let Some(c) = chars.next() {
        if cur.trim().is_empty() && !c.is_whitespace() {
            cur_line = line;
        }
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax(line, "unbalanced `)`"));
                }
                cur.push(c);
            }
            '\n' if depth > 0 => {
                line += 1;
                cur.push(' ');
            }
            '\n' | ';' => {
                let items = &mut stack.last_mut().unwrap().2;
                flush(&mut cur, cur_line, None, items);
                if c == '\n' {
                    line += 1;
                }
            }
            '#' => {
                let mut comment = String::new();
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    comment.push(d);
                    chars.next();
                }
                if depth == 0 {
                    let items = &mut stack.last_mut().unwrap().2;
                    flush(&mut cur, cur_line, Some(comment.trim().to_string()), items);
                }
            }
            '{' if depth == 0 => {
                let header = cur.trim().to_string();
                if header.is_empty() {
                    return Err(syntax(line, "block without a name"));
                }
                cur.clear();
                stack.push((cur_line, header, Vec::new()));
            }
            '}' if depth == 0 => {
                let items = &mut stack.last_mut().unwrap().2;
                flush(&mut cur, cur_line, None, items);
                if stack.len() == 1 {
                    return Err(syntax(line, "unbalanced `}`"));
                }
                let (l, header, items) = stack.pop().unwrap();
                stack.last_mut().unwrap().2.push(Item::Block { line: l, header, items });
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(syntax(line, "unbalanced `(`"));
    }
    let items = &mut stack.last_mut().unwrap().2;
    flush(&mut cur, cur_line, None, items);
    if stack.len() != 1 {
        return Err(syntax(stack.last().unwrap().0, "unclosed block"));
    }
    Ok(stack.pop().unwrap().2)
}

/// Top-level s-expressions and bare words of a statement tail.
pub fn split_sexprs(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => {
                if depth == 0 && !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                    cur.clear();
                }
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
                if depth == 0 {
                    out.push(cur.trim().to_string());
                    cur.clear();
                }
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn keyword(text: &str) -> (&str, &str) {
    let t = text.trim();
    match t.find(char::is_whitespace) {
        Some(i) => (&t[..i], t[i..].trim()),
        None => (t, ""),
    }
}

fn term_at(text: &str, line: usize, reg: &SeriesRegistry) -> Result<Term, FormatError> {
    parse_term(text, reg).map_err(|source| FormatError::Expr { line, source })
}

fn formula_at(text: &str, line: usize, reg: &SeriesRegistry) -> Result<Formula, FormatError> {
    parse_formula(text, reg).map_err(|source| FormatError::Expr { line, source })
}

fn poly_at(text: &str, line: usize) -> Result<KPoly, FormatError> {
    let t = term_at(text, line, &SeriesRegistry::empty())?;
    KPoly::from_term(&t).ok_or_else(|| syntax(line, format!("{text} is not a polynomial")))
}

fn point_at(text: &str, line: usize) -> Result<Vec<Scalar>, FormatError> {
    parse_point(text).map_err(|e| syntax(line, e.to_string()))
}

/// Comma-separated items inside one pair of parentheses.
fn paren_list(text: &str, line: usize) -> Result<Vec<String>, FormatError> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("expected a parenthesized list, got `{text}`")))?;
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    Ok(out)
}

// ---- series registry ----

/// Blocks `series NAME ARITY { (e1,..,ek) : scalar ... rule exp <scalar> tail d0 slope tau0 }`.
pub fn parse_registry(text: &str) -> Result<SeriesRegistry, FormatError> {
    let mut reg = SeriesRegistry::with_builtins();
    for item in parse_items(text)? {
        let Item::Block { line, header, items } = item else {
            return Err(syntax(item_line(&item), "expected a `series` block"));
        };
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [kw, name, arity] = parts.as_slice() else {
            return Err(syntax(line, "expected `series NAME ARITY`"));
        };
        if *kw != "series" {
            return Err(syntax(line, format!("unknown block `{kw}`")));
        }
        let arity: usize = arity.parse().map_err(|_| syntax(line, "arity must be a number"))?;
        let mut coeffs = BTreeMap::new();
        let mut tail = None;
        let mut rule = None;
        for it in items {
            let Item::Stmt(st) = it else {
                return Err(syntax(item_line(&it), "nested block in series"));
            };
            let (kw, rest) = keyword(&st.text);
            match kw {
                "tail" => {
                    let nums: Vec<&str> = rest.split_whitespace().collect();
                    let [d0, slope, tau0] = nums.as_slice() else {
                        return Err(syntax(st.line, "expected `tail d0 slope tau0`"));
                    };
                    let bad = || syntax(st.line, "tail entries must be integers");
                    tail = Some(TailCertificate {
                        d0: d0.parse().map_err(|_| bad())?,
                        slope: slope.parse().map_err(|_| bad())?,
                        tau0: tau0.parse().map_err(|_| bad())?,
                    });
                }
                "rule" => {
                    let (kind, tau) = keyword(rest);
                    if kind != "exp" {
                        return Err(syntax(st.line, format!("unknown rule `{kind}`")));
                    }
                    let tau: Scalar = tau.parse().map_err(|e: crate::scalar::ScalarError| syntax(st.line, e.to_string()))?;
                    rule = Some(CoefficientRule::Exp { tau });
                }
                _ => {
                    let (tuple, value) = st
                        .text
                        .split_once(':')
                        .ok_or_else(|| syntax(st.line, "expected `(exponents) : scalar`"))?;
                    let exps = paren_list(tuple, st.line)?
                        .iter()
                        .map(|e| e.parse::<u32>().map_err(|_| syntax(st.line, "bad exponent")))
                        .collect::<Result<Vec<_>, _>>()?;
                    let c: Scalar = value.trim().parse().map_err(|e: crate::scalar::ScalarError| syntax(st.line, e.to_string()))?;
                    coeffs.insert(exps, c);
                }
            }
        }
        let tail = tail.ok_or_else(|| syntax(line, "missing `tail` line"))?;
        let s = StrictSeries::new(*name, arity, coeffs, tail, rule).map_err(|e| syntax(line, e.to_string()))?;
        reg.insert(s);
    }
    Ok(reg)
}

fn item_line(item: &Item) -> usize {
    match item {
        Item::Stmt(s) => s.line,
        Item::Block { line, .. } => *line,
    }
}

// ---- admissible maps ----

fn parse_model(items: &[Item]) -> Result<Model, FormatError> {
    let mut vars = Vec::new();
    let mut rels = Vec::new();
    for it in items {
        let Item::Stmt(st) = it else {
            return Err(syntax(item_line(it), "nested block in model"));
        };
        let (kw, rest) = keyword(&st.text);
        match kw {
            "vars" => vars.extend(rest.split_whitespace().map(str::to_string)),
            "rels" => {
                for r in split_sexprs(rest) {
                    rels.push(poly_at(&r, st.line)?);
                }
            }
            _ => return Err(syntax(st.line, format!("expected `vars` or `rels`, got `{kw}`"))),
        }
    }
    Ok(Model { vars, rels })
}

fn parse_special(items: &[Item]) -> Result<SpecialSet, FormatError> {
    let mut conds = Vec::new();
    for it in items {
        let Item::Stmt(st) = it else {
            return Err(syntax(item_line(it), "nested block in special set"));
        };
        let (kw, rest) = keyword(&st.text);
        let sign = match kw {
            "lt" => Sign::Lt,
            "ge" => Sign::Ge,
            _ => return Err(syntax(st.line, format!("expected `lt` or `ge`, got `{kw}`"))),
        };
        conds.push((poly_at(rest, st.line)?, sign));
    }
    SpecialSet::new(conds).map_err(|e| syntax(item_line(&items[0]), e.to_string()))
}

fn parse_bindings(items: &[Item]) -> Result<BTreeMap<String, KPoly>, FormatError> {
    let mut out = BTreeMap::new();
    for it in items {
        let Item::Stmt(st) = it else {
            return Err(syntax(item_line(it), "nested block in bindings"));
        };
        let (var, image) = st
            .text
            .split_once('=')
            .ok_or_else(|| syntax(st.line, "expected `var = polynomial`"))?;
        out.insert(var.trim().to_string(), poly_at(image.trim(), st.line)?);
    }
    Ok(out)
}

/// An admissible map, plus the special set if the file declares one.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub map: AdmissibleMap,
    pub special: Option<SpecialSet>,
}

fn map_from_items(items: &[Item], line0: usize) -> Result<MapFile, FormatError> {
    let mut source = None;
    let mut target = None;
    let mut morphism = None;
    let mut flat = false;
    let mut provenance = String::new();
    let mut special = None;
    for it in items {
        match it {
            Item::Block { header, items, line } => match header.as_str() {
                "source" => source = Some(parse_model(items)?),
                "target" => target = Some(parse_model(items)?),
                "morphism" => morphism = Some(parse_bindings(items)?),
                "special" => special = Some(parse_special(items)?),
                other => return Err(syntax(*line, format!("unknown block `{other}`"))),
            },
            Item::Stmt(st) => {
                let (kw, rest) = keyword(&st.text);
                if kw != "flat" {
                    return Err(syntax(st.line, format!("unexpected `{kw}`")));
                }
                flat = match rest {
                    "true" => true,
                    "false" => false,
                    _ => return Err(syntax(st.line, "expected `flat true` or `flat false`")),
                };
                if let Some(c) = &st.comment {
                    provenance = c.strip_prefix("provenance:").unwrap_or(c).trim().to_string();
                }
            }
        }
    }
    let source = source.ok_or_else(|| syntax(line0, "missing `source` block"))?;
    let target = target.ok_or_else(|| syntax(line0, "missing `target` block"))?;
    let morphism = morphism.ok_or_else(|| syntax(line0, "missing `morphism` block"))?;
    let mut map = AdmissibleMap::new(source, target, morphism);
    map.flat_asserted = flat;
    map.provenance = provenance;
    map.validate().map_err(|e| syntax(line0, e.to_string()))?;
    Ok(MapFile { map, special })
}

/// Blocks `source { vars ..; rels ..; }`, `target { .. }`, `morphism { x = <poly> }`,
/// an optional `special { lt <poly>; ge <poly> }`, and `flat true # provenance: ..`.
pub fn parse_admissible_map(text: &str) -> Result<MapFile, FormatError> {
    map_from_items(&parse_items(text)?, 1)
}

// ---- blow-ups and flattening data ----

fn parse_blowup_items(items: &[Item], line: usize, reg: &SeriesRegistry) -> Result<(BlowupSpec, Vec<CenterPoint>, bool), FormatError> {
    let mut ambient = Vec::new();
    let mut guard = Formula::truth();
    let mut center = Vec::new();
    let mut points = Vec::new();
    let mut has_points = false;
    for it in items {
        let Item::Stmt(st) = it else { continue };
        let (kw, rest) = keyword(&st.text);
        match kw {
            "ambient" => ambient.extend(rest.split_whitespace().map(str::to_string)),
            "guard" => guard = formula_at(rest, st.line, reg)?,
            "center" => {
                center = paren_list(rest, st.line)?
                    .iter()
                    .map(|g| term_at(g, st.line, reg))
                    .collect::<Result<_, _>>()?
            }
            "points" if rest == "none" => has_points = true,
            "point" => {
                has_points = true;
                let parts = split_sexprs(rest);
                let point = point_at(parts.first().map(String::as_str).unwrap_or(""), st.line)?;
                let witness = match parts.get(1).map(String::as_str) {
                    None => None,
                    Some("witness") => Some(point_at(
                        parts.get(2).ok_or_else(|| syntax(st.line, "missing witness point"))?,
                        st.line,
                    )?),
                    Some(other) => return Err(syntax(st.line, format!("unexpected `{other}`"))),
                };
                points.push(CenterPoint { point, witness });
            }
            _ => return Err(syntax(st.line, format!("unknown blow-up statement `{kw}`"))),
        }
    }
    if ambient.is_empty() {
        let mut vs = std::collections::BTreeSet::new();
        for g in &center {
            g.free_vars_into(&mut vs);
        }
        ambient = vs.into_iter().collect();
    }
    let spec = BlowupSpec {
        ambient,
        center,
        guard,
        equations: Vec::new(),
    };
    spec.validate().map_err(|e| syntax(line, e.to_string()))?;
    Ok((spec, points, has_points))
}

/// A `blowup { ambient ..; guard <formula>; center (g1, ..); point (..) [witness (..)] }` block.
pub fn parse_blowup(text: &str, reg: &SeriesRegistry) -> Result<(BlowupSpec, Vec<CenterPoint>), FormatError> {
    let items = parse_items(text)?;
    let block = items
        .iter()
        .find_map(|it| match it {
            Item::Block { header, items, line } if header == "blowup" => Some((items, *line)),
            _ => None,
        })
        .ok_or_else(|| syntax(1, "missing `blowup` block"))?;
    let (spec, points, _) = parse_blowup_items(block.0, block.1, reg)?;
    Ok((spec, points))
}

fn read_relative(base: Option<&Path>, path: &str) -> Result<String, FormatError> {
    let p: PathBuf = match base {
        Some(b) => b.join(path),
        None => PathBuf::from(path),
    };
    std::fs::read_to_string(&p).map_err(|e| FormatError::Io {
        path: p.display().to_string(),
        msg: e.to_string(),
    })
}

fn map_block(items: &[Item], line: usize, base: Option<&Path>) -> Result<MapFile, FormatError> {
    if let [Item::Stmt(st)] = items {
        let (kw, rest) = keyword(&st.text);
        if kw == "model" {
            return parse_admissible_map(&read_relative(base, rest)?);
        }
    }
    map_from_items(items, line)
}

fn final_block(items: &[Item], line: usize, base: Option<&Path>) -> Result<FinalMap, FormatError> {
    let mut model_items = Vec::new();
    let mut theta = None;
    for it in items {
        match it {
            Item::Block { header, items, .. } if header == "theta" => theta = Some(parse_bindings(items)?),
            other => model_items.push(other.clone()),
        }
    }
    let mf = map_block(&model_items, line, base)?;
    let theta = theta.ok_or_else(|| syntax(line, "final block needs a `theta { .. }` block"))?;
    Ok(FinalMap { map: mf.map, theta })
}

/// A flattening datum and the set `Ω` it is applied to.
#[derive(Debug, Clone, PartialEq)]
pub struct DatumFile {
    pub datum: FlatteningDatum,
    pub omega: SpecialSet,
}

/// `map { .. }` (or `map { model <file> }`), optional `omega { lt ..; ge .. }`,
/// at most one `blowup { .. }`, then one `final { model <file>; theta { .. } }`
/// per chart (or a single `final` without a blow-up). Paths are relative to `base`.
pub fn parse_datum(text: &str, reg: &SeriesRegistry, base: Option<&Path>) -> Result<DatumFile, FormatError> {
    let items = parse_items(text)?;
    let mut map = None;
    let mut omega = SpecialSet::whole();
    let mut blowup = None;
    let mut finals = Vec::new();
    let mut provenance = String::new();
    for it in &items {
        match it {
            Item::Block { header, items, line } => match header.as_str() {
                "map" => map = Some(map_block(items, *line, base)?.map),
                "omega" => omega = parse_special(items)?,
                "blowup" => {
                    if blowup.is_some() {
                        return Err(syntax(*line, "only one blow-up level is supported"));
                    }
                    blowup = Some(parse_blowup_items(items, *line, reg)?);
                }
                "final" => finals.push(final_block(items, *line, base)?),
                other => return Err(syntax(*line, format!("unknown block `{other}`"))),
            },
            Item::Stmt(st) => {
                let (kw, rest) = keyword(&st.text);
                if kw != "provenance" {
                    return Err(syntax(st.line, format!("unexpected `{kw}`")));
                }
                provenance = rest.to_string();
            }
        }
    }
    let map = map.ok_or_else(|| syntax(1, "missing `map` block"))?;
    let root = match blowup {
        None => {
            if finals.len() != 1 {
                return Err(syntax(1, "without a blow-up exactly one `final` block is expected"));
            }
            DatumNode::Final(finals.pop().unwrap())
        }
        Some((spec, points, has_points)) => {
            if finals.len() != spec.arity() {
                return Err(syntax(1, format!("{} charts need {} `final` blocks", spec.arity(), spec.arity())));
            }
            DatumNode::Blowup {
                spec,
                centers: has_points.then_some(points),
                charts: finals.into_iter().map(DatumNode::Final).collect(),
            }
        }
    };
    Ok(DatumFile {
        datum: FlatteningDatum { map, root, provenance },
        omega,
    })
}
