//! Stand-alone checker for the CPLEX LP text format, written against the
//! format description rather than the exporter: sections, signed linear
//! expressions, row labels, senses, right-hand sides, declared binaries.

use std::collections::{BTreeMap, BTreeSet};

pub const MAX_LINE: usize = 255;
pub const MAX_NAME: usize = 255;

#[derive(Debug, Default)]
pub struct LpFile {
    pub objective_sense: String,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<Row>,
    pub binaries: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub sense: String,
    pub rhs: f64,
}

impl LpFile {
    /// Every variable mentioned anywhere.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut all: BTreeSet<String> = self.binaries.clone();
        all.extend(self.objective.iter().map(|(_, v)| v.clone()));
        for r in &self.rows {
            all.extend(r.terms.iter().map(|(_, v)| v.clone()));
        }
        all
    }

    /// Row counts keyed by the label prefix before the first `_`.
    pub fn rows_by_prefix(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            let prefix = r.name.split('_').next().unwrap_or("").to_string();
            *out.entry(prefix).or_insert(0) += 1;
        }
        out
    }
}

const NAME_PUNCT: &str = "!\"#$%&()/,.;?@_`'{}|~";

pub fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else { return false };
    if s.len() > MAX_NAME || first.is_ascii_digit() || first == '.' {
        return false;
    }
    // a leading e/E followed by a digit reads as an exponent
    if (first == 'e' || first == 'E') && s[1..].starts_with(|c: char| c.is_ascii_digit()) {
        return false;
    }
    s.chars().all(|c| c.is_ascii_alphanumeric() || NAME_PUNCT.contains(c))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Sign(f64),
    Sense(String),
    Label(String),
    Name(String),
}

fn tokens(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let t = match word {
            "+" => Tok::Sign(1.0),
            "-" => Tok::Sign(-1.0),
            "<=" | "=<" | "<" => Tok::Sense("<=".into()),
            ">=" | "=>" | ">" => Tok::Sense(">=".into()),
            "=" => Tok::Sense("=".into()),
            w if w.ends_with(':') => {
                let label = &w[..w.len() - 1];
                if !valid_name(label) {
                    return Err(format!("bad row label `{label}`"));
                }
                Tok::Label(label.into())
            }
            w => match w.parse::<f64>() {
                Ok(x) => Tok::Num(x),
                Err(_) if valid_name(w) => Tok::Name(w.into()),
                Err(_) => return Err(format!("bad token `{w}`")),
            },
        };
        out.push(t);
    }
    Ok(out)
}

/// Parses `[sign] [coef] name` terms until something else appears.
fn expression(toks: &[Tok], mut i: usize) -> Result<(Vec<(f64, String)>, usize), String> {
    let mut terms = Vec::new();
    loop {
        let mut sign = None;
        if let Some(Tok::Sign(s)) = toks.get(i) {
            sign = Some(*s);
            i += 1;
        }
        if !terms.is_empty() && sign.is_none() {
            return Ok((terms, i));
        }
        match (toks.get(i), toks.get(i + 1)) {
            (Some(Tok::Num(c)), Some(Tok::Name(v))) => {
                terms.push((sign.unwrap_or(1.0) * c, v.clone()));
                i += 2;
            }
            (Some(Tok::Name(v)), _) => {
                terms.push((sign.unwrap_or(1.0), v.clone()));
                i += 1;
            }
            _ if sign.is_some() => return Err(format!("dangling sign before {:?}", toks.get(i))),
            _ => return Ok((terms, i)),
        }
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    let l = line.trim().to_ascii_lowercase();
    Some(match l.as_str() {
        "minimize" | "minimum" | "min" | "maximize" | "maximum" | "max" => Section::Objective,
        "subject to" | "such that" | "st" | "s.t." | "st." => Section::Constraints,
        "bounds" | "bound" => Section::Bounds,
        "binaries" | "binary" | "bin" => Section::Binaries,
        "generals" | "general" | "gen" => Section::Generals,
        "end" => Section::End,
        _ => return None,
    })
}

pub fn parse(text: &str) -> Result<LpFile, String> {
    let mut lp = LpFile::default();
    let mut section = Section::Start;
    let mut bodies: BTreeMap<u8, String> = BTreeMap::new();
    let key = |s: Section| s as u8;
    for (no, raw) in text.lines().enumerate() {
        if raw.len() > MAX_LINE {
            return Err(format!("line {} has {} characters", no + 1, raw.len()));
        }
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(next) = section_of(line) {
            let order = [Section::Start, Section::Objective, Section::Constraints, Section::Bounds];
            let pos = |s: Section| order.iter().position(|&o| o == s);
            if let (Some(a), Some(b)) = (pos(section), pos(next)) {
                if b <= a {
                    return Err(format!("line {}: section out of order", no + 1));
                }
            }
            if section == Section::End {
                return Err("content after End".into());
            }
            if next == Section::Objective {
                lp.objective_sense = line.trim().to_ascii_lowercase();
            }
            section = next;
            continue;
        }
        match section {
            Section::Start => return Err(format!("line {}: text before the objective section", no + 1)),
            Section::End => return Err("content after End".into()),
            s => {
                let body = bodies.entry(key(s)).or_default();
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    if section != Section::End {
        return Err("missing End".into());
    }
    if lp.objective_sense.is_empty() {
        return Err("missing objective section".into());
    }

    let objective = tokens(bodies.get(&key(Section::Objective)).map_or("", String::as_str))?;
    let mut i = 0;
    if let Some(Tok::Label(_)) = objective.first() {
        i = 1;
    }
    let (terms, end) = expression(&objective, i)?;
    if end != objective.len() {
        return Err(format!("trailing tokens in objective: {:?}", &objective[end..]));
    }
    lp.objective = terms;

    let toks = tokens(bodies.get(&key(Section::Constraints)).map_or("", String::as_str))?;
    let mut i = 0;
    let mut seen = BTreeSet::new();
    while i < toks.len() {
        let name = match &toks[i] {
            Tok::Label(l) => {
                i += 1;
                l.clone()
            }
            _ => format!("R{}", lp.rows.len() + 1),
        };
        if !seen.insert(name.clone()) {
            return Err(format!("duplicate row label `{name}`"));
        }
        let (terms, next) = expression(&toks, i)?;
        if terms.is_empty() {
            return Err(format!("row `{name}` has no terms"));
        }
        let mut vars = BTreeSet::new();
        if let Some((_, v)) = terms.iter().find(|(_, v)| !vars.insert(v.clone())) {
            return Err(format!("row `{name}` repeats `{v}`"));
        }
        i = next;
        let sense = match toks.get(i) {
            Some(Tok::Sense(s)) => s.clone(),
            other => return Err(format!("row `{name}`: expected a sense, found {other:?}")),
        };
        i += 1;
        let mut sign = 1.0;
        if let Some(Tok::Sign(s)) = toks.get(i) {
            sign = *s;
            i += 1;
        }
        let rhs = match toks.get(i) {
            Some(Tok::Num(x)) => sign * x,
            other => return Err(format!("row `{name}`: expected a right-hand side, found {other:?}")),
        };
        i += 1;
        lp.rows.push(Row { name, terms, sense, rhs });
    }

    for t in tokens(bodies.get(&key(Section::Binaries)).map_or("", String::as_str))? {
        match t {
            Tok::Name(v) => {
                if !lp.binaries.insert(v.clone()) {
                    return Err(format!("`{v}` declared binary twice"));
                }
            }
            other => return Err(format!("unexpected {other:?} in Binaries")),
        }
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\\ comment\nMinimize\n obj: 0 x\nSubject To\n c1: x + 2 y\n   - z >= -1\n c2: x = 1\nBinaries\n x y z\nEnd\n";

    #[test]
    fn accepts_a_small_file() {
        let lp = parse(GOOD).unwrap();
        assert_eq!(lp.rows.len(), 2);
        assert_eq!(lp.rows[0].terms, [(1.0, "x".into()), (2.0, "y".into()), (-1.0, "z".into())]);
        assert_eq!(lp.rows[0].rhs, -1.0);
        assert_eq!(lp.binaries.len(), 3);
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            GOOD.replace("End\n", ""),
            GOOD.replace("c2: x = 1", "c2: x = "),
            GOOD.replace("c2: x = 1", "c1: x = 1"),
            GOOD.replace("x y z", "x y 1z"),
            GOOD.replace("2 y", "2 y y"),
            GOOD.replace("+ 2 y", "+ + y"),
            GOOD.replace("Minimize", "Subject To"),
            format!("{GOOD}x\n"),
            GOOD.replace(" obj: 0 x", &format!(" obj: 0 {}", "x".repeat(300))),
        ] {
            assert!(parse(&bad).is_err(), "accepted:\n{bad}");
        }
        assert!(!valid_name("e1x") && !valid_name(".a") && !valid_name("a b") && valid_name("x_1_S_00"));
    }
}
