use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::{FeasibilityModel, ModelOptions, Sense, Tag, VarId, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Lp,
    Mps,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Lp => "lp",
            Format::Mps => "mps",
        }
    }
}

const LP_LINE: usize = 240;

fn is_safe(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Exported identifiers: vertex names restricted to `[A-Za-z0-9_]`, with
/// unsafe names replaced by `vv<index>` aliases.
#[derive(Debug, Clone)]
pub struct Names {
    vertices: Vec<String>,
    aliases: Vec<(String, String)>,
}

impl Names {
    pub fn new(vertex_names: &[String]) -> Self {
        let mut taken: HashSet<String> = vertex_names.iter().filter(|s| is_safe(s)).cloned().collect();
        let mut vertices = Vec::with_capacity(vertex_names.len());
        let mut aliases = Vec::new();
        for (i, name) in vertex_names.iter().enumerate() {
            if is_safe(name) {
                vertices.push(name.clone());
                continue;
            }
            let mut alias = format!("vv{i}");
            while taken.contains(&alias) {
                alias.push('_');
            }
            taken.insert(alias.clone());
            aliases.push((name.clone(), alias.clone()));
            vertices.push(alias);
        }
        Names { vertices, aliases }
    }

    pub fn vertex(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    /// `(original, alias)` for every renamed vertex.
    pub fn aliases(&self) -> &[(String, String)] {
        &self.aliases
    }
}

fn tuple_label(index: usize, len: usize, q: usize) -> String {
    let t = crate::coding::index_tuple(index, len, q);
    if q <= 10 {
        t.iter().map(|s| char::from(b'0' + s)).collect()
    } else {
        t.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("d")
    }
}

/// Name of variable `id`, e.g. `x_1_S_01`, `z_V3_12_0`, `w_2_V3_12_0`.
pub fn variable_name(model: &FeasibilityModel, names: &Names, id: VarId) -> String {
    let var = &model.variables()[id];
    let q = model.meta.q;
    let v = var.vertex;
    let (ki, ko) = (log_len(model.shapes[v].in_count, q), log_len(model.shapes[v].out_count, q));
    let vn = names.vertex(v);
    let c = var.codeword.map(|c| c + 1).unwrap_or(0);
    match var.kind {
        VarKind::X => format!("x_{c}_{vn}_{}", tuple_label(var.output.unwrap(), ko, q)),
        VarKind::Y => format!("y_{c}_{vn}_{}", tuple_label(var.input.unwrap(), ki, q)),
        VarKind::Z => format!(
            "z_{vn}_{}_{}",
            tuple_label(var.input.unwrap(), ki, q),
            tuple_label(var.output.unwrap(), ko, q)
        ),
        VarKind::W => format!(
            "w_{c}_{vn}_{}_{}",
            tuple_label(var.input.unwrap(), ki, q),
            tuple_label(var.output.unwrap(), ko, q)
        ),
    }
}

fn log_len(count: usize, q: usize) -> usize {
    let (mut len, mut c) = (0, 1);
    while c < count {
        c *= q;
        len += 1;
    }
    len
}

fn row_names(model: &FeasibilityModel) -> Vec<String> {
    let mut counters = std::collections::BTreeMap::<Tag, usize>::new();
    model
        .constraints()
        .iter()
        .map(|r| {
            let k = counters.entry(r.tag).or_default();
            *k += 1;
            format!("{}_{}", r.tag, k)
        })
        .collect()
}

/// `<network>_q<q>_M<M>[_rf][_sym].<ext>`
pub fn model_file_name(network: &str, q: usize, code_size: usize, opts: &ModelOptions, format: Format) -> String {
    let mut name = format!("{network}_q{q}_M{code_size}");
    if opts.routing_fix {
        name.push_str("_rf");
    }
    if opts.symmetry_break {
        name.push_str("_sym");
    }
    name.push('.');
    name.push_str(format.extension());
    name
}

fn header(model: &FeasibilityModel, names: &Names, comment: &str) -> String {
    let m = &model.meta;
    let mut out = String::new();
    let _ = writeln!(out, "{comment} netcap feasibility model");
    let _ = writeln!(out, "{comment} network: {}", m.network);
    let _ = writeln!(out, "{comment} q: {}  code size M: {}", m.q, m.code_size);
    let _ = writeln!(
        out,
        "{comment} options: routing_fix={} symmetry_break={}",
        m.options.routing_fix, m.options.symmetry_break
    );
    let _ = writeln!(
        out,
        "{comment} variables: x_<c>_<V>_<out tuple>, y_<c>_<V>_<in tuple>, z_<V>_<in>_<out>, w_<c>_<V>_<in>_<out>"
    );
    if !names.aliases().is_empty() {
        let _ = writeln!(out, "{comment} vertex aliases:");
        for (orig, alias) in names.aliases() {
            let _ = writeln!(out, "{comment}   {alias} = {orig:?}");
        }
    }
    out
}

/// Serialises the model as CPLEX LP or free MPS text. The objective is the
/// constant zero.
pub fn export_model(model: &FeasibilityModel, format: Format) -> String {
    let names = Names::new(model.vertex_names());
    let vars: Vec<String> = (0..model.variables().len()).map(|i| variable_name(model, &names, i)).collect();
    let rows = row_names(model);
    match format {
        Format::Lp => write_lp(model, &names, &vars, &rows),
        Format::Mps => write_mps(model, &names, &vars, &rows),
    }
}

fn push_wrapped(out: &mut String, line: &mut String, piece: &str) {
    if line.len() + piece.len() + 1 > LP_LINE {
        out.push_str(line);
        out.push('\n');
        line.clear();
        line.push_str("   ");
    }
    line.push(' ');
    line.push_str(piece);
}

fn write_lp(model: &FeasibilityModel, names: &Names, vars: &[String], rows: &[String]) -> String {
    let mut out = header(model, names, "\\");
    out.push_str("Minimize\n obj: 0 ");
    out.push_str(vars.first().map(String::as_str).unwrap_or(""));
    out.push_str("\nSubject To\n");
    for (r, row) in model.constraints().iter().enumerate() {
        let mut line = format!(" {}:", rows[r]);
        for (i, &(a, v)) in row.terms.iter().enumerate() {
            let sign = if a < 0 { "-" } else if i == 0 { "" } else { "+" };
            let piece = match (a.abs(), sign) {
                (1, "") => vars[v].clone(),
                (1, s) => format!("{s} {}", vars[v]),
                (k, "") => format!("{k} {}", vars[v]),
                (k, s) => format!("{s} {k} {}", vars[v]),
            };
            push_wrapped(&mut out, &mut line, &piece);
        }
        push_wrapped(&mut out, &mut line, &format!("{} {}", row.sense.symbol(), row.rhs));
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("Binaries\n");
    let mut line = String::new();
    for v in vars {
        push_wrapped(&mut out, &mut line, v);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

fn write_mps(model: &FeasibilityModel, names: &Names, vars: &[String], rows: &[String]) -> String {
    let mut out = header(model, names, "*");
    let _ = writeln!(out, "NAME {}", model.meta.network.replace(char::is_whitespace, "_"));
    out.push_str("ROWS\n N obj\n");
    for (r, row) in model.constraints().iter().enumerate() {
        let s = match row.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {s} {}", rows[r]);
    }
    let mut columns: Vec<Vec<(usize, i64)>> = vec![Vec::new(); vars.len()];
    for (r, row) in model.constraints().iter().enumerate() {
        for &(a, v) in &row.terms {
            columns[v].push((r, a));
        }
    }
    out.push_str("COLUMNS\n");
    out.push_str(" MARKER 'MARKER' 'INTORG'\n");
    for (v, col) in columns.iter().enumerate() {
        let _ = writeln!(out, " {} obj 0", vars[v]);
        for &(r, a) in col {
            let _ = writeln!(out, " {} {} {a}", vars[v], rows[r]);
        }
    }
    out.push_str(" MARKER 'MARKER' 'INTEND'\n");
    out.push_str("RHS\n");
    for (r, row) in model.constraints().iter().enumerate() {
        if row.rhs != 0 {
            let _ = writeln!(out, " rhs {} {}", rows[r], row.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for v in vars {
        let _ = writeln!(out, " BV bnd {v}");
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Serialize)]
struct Sidecar<'a> {
    network: &'a str,
    q: usize,
    code_size: usize,
    options: &'a ModelOptions,
    format: Format,
    file: &'a str,
    variables: std::collections::BTreeMap<VarKind, usize>,
    constraints: std::collections::BTreeMap<Tag, usize>,
    vertex_aliases: std::collections::BTreeMap<String, String>,
    naming: &'static str,
    objective: &'static str,
}

/// Metadata JSON written next to an exported model.
pub fn sidecar_json(model: &FeasibilityModel, format: Format, file: &str) -> String {
    let stats = model.stats();
    let names = Names::new(model.vertex_names());
    let sidecar = Sidecar {
        network: &model.meta.network,
        q: model.meta.q,
        code_size: model.meta.code_size,
        options: &model.meta.options,
        format,
        file,
        variables: stats.variables,
        constraints: stats.constraints,
        vertex_aliases: names.aliases().iter().cloned().collect(),
        naming: "x_<c>_<V>_<out tuple>, y_<c>_<V>_<in tuple>, z_<V>_<in tuple>_<out tuple>, \
                 w_<c>_<V>_<in tuple>_<out tuple>; c is 1-based; tuples list symbols in edge order, \
                 concatenated for q <= 10 and joined by 'd' otherwise",
        objective: "zero (pure feasibility)",
    };
    serde_json::to_string_pretty(&sidecar).expect("sidecar serializes")
}
