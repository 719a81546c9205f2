use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use netcap::coding::{make_alphabet, Alphabet, Certificate, CertificateError, CertificateFile, Collision};
use netcap::model::{build_model, export_model, model_file_name, sidecar_json, Format, ModelOptions, ModelStats};
use netcap::network::{
    builtin_network, min_cut, min_cut_at, mu, routing_fixable_vertices, validate_network, Builtin, Network,
    RawNetwork,
};
use netcap::search::{
    decide_feasible, linear_max_code_size, max_code_size, verify_certificate, CapacityMode, CapacityOptions,
    CapacityStatus, Outcome, Report, SearchOptions, Verification,
};
use serde::Serialize;

use crate::{
    CapacityArgs, ExamplesArgs, FormatArg, MincutArgs, ModelArgs, NetworkSource, SearchFlags, SolveArgs,
    ValidateArgs, VerifyArgs,
};

pub const OK: u8 = 0;
pub const NO: u8 = 1;
pub const USAGE: u8 = 2;
pub const BOUNDS: u8 = 3;

pub const DATA_DIR_VAR: &str = "NETCAP_DATA_DIR";

/// Listed by `examples`; `combination:n,k` accepts any `n >= k >= 1`.
const BUILTINS: [&str; 3] = ["butterfly", "latin", "combination:5,2"];

/// The data directory: `$NETCAP_DATA_DIR`, else the repository's `data/`
/// when it is still where the binary was built from.
fn data_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(DATA_DIR_VAR) {
        return Some(PathBuf::from(dir));
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").canonicalize().ok()
}

enum Parsed {
    Valid(Network),
    Invalid(Vec<String>),
}

fn parse_text(text: &str) -> Parsed {
    match RawNetwork::from_json(text) {
        Err(e) => Parsed::Invalid(vec![format!("syntax: {e}")]),
        Ok(raw) => match validate_network(&raw) {
            Ok(n) => Parsed::Valid(n),
            Err(errs) => Parsed::Invalid(errs.0.iter().map(ToString::to_string).collect()),
        },
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Resolves the network source to a display name and a parse result.
/// Only unreadable files and unknown builtins are hard errors.
fn parse_source(src: &NetworkSource) -> Result<(String, Parsed)> {
    if let Some(path) = &src.network {
        let name = path.file_stem().map_or("network".into(), |s| s.to_string_lossy().into_owned());
        return Ok((name, parse_text(&read_file(path)?)));
    }
    let spec = src.builtin.as_deref().expect("clap requires one source");
    let which: Builtin = spec.parse()?;
    let name = which.file_stem();
    if let Some(dir) = std::env::var_os(DATA_DIR_VAR) {
        let path = Path::new(&dir).join(format!("{name}.json"));
        if path.is_file() {
            return Ok((name, parse_text(&read_file(&path)?)));
        }
        if !matches!(which, Builtin::Combination { .. }) {
            bail!("{DATA_DIR_VAR} is set but {} does not exist", path.display());
        }
    }
    Ok((name, Parsed::Valid(builtin_network(&which)?)))
}

fn load(src: &NetworkSource) -> Result<(String, Network)> {
    match parse_source(src)? {
        (name, Parsed::Valid(n)) => Ok((name, n)),
        (name, Parsed::Invalid(problems)) => {
            bail!("network `{name}` is invalid:\n  - {}", problems.join("\n  - "))
        }
    }
}

fn seconds(flag: &str, secs: Option<f64>) -> Result<Option<Duration>> {
    match secs {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => bail!("{flag} must be a non-negative number of seconds, got {s}"),
    }
}

fn search_options(flags: &SearchFlags, linear: bool) -> Result<SearchOptions> {
    if flags.workers == 0 {
        bail!("--workers must be at least 1");
    }
    Ok(SearchOptions {
        routing_fix: !flags.no_routing_fix,
        symmetry_break: !flags.no_symmetry_break,
        linear_only: linear,
        time_limit: seconds("--time-limit", flags.time_limit)?,
        node_limit: flags.node_limit,
        workers: flags.workers,
    })
}

fn alphabet(q: usize, field: bool, linear: bool) -> Result<Alphabet> {
    make_alphabet(q, field || linear).with_context(|| {
        if linear {
            format!("linear codes need a field, and q={q} has none")
        } else {
            format!("bad alphabet size q={q}")
        }
    })
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn print_table(rows: &[(&str, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.into()
}

fn list<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Serialize)]
struct NetworkSummary {
    network: String,
    valid: bool,
    problems: Vec<String>,
    vertices: usize,
    edges: usize,
    source: Option<String>,
    terminals: Vec<String>,
    intermediates: Vec<String>,
    edge_order: Vec<String>,
    routing_fixable: Vec<String>,
    mu: Option<usize>,
}

fn summarize(name: String, parsed: &Parsed) -> NetworkSummary {
    let mut s = NetworkSummary {
        network: name,
        valid: false,
        problems: Vec::new(),
        vertices: 0,
        edges: 0,
        source: None,
        terminals: Vec::new(),
        intermediates: Vec::new(),
        edge_order: Vec::new(),
        routing_fixable: Vec::new(),
        mu: None,
    };
    match parsed {
        Parsed::Invalid(problems) => s.problems = problems.clone(),
        Parsed::Valid(n) => {
            let names = |vs: &mut dyn Iterator<Item = usize>| vs.map(|v| n.vertex_name(v).to_string()).collect();
            s.valid = true;
            s.vertices = n.vertex_count();
            s.edges = n.edge_count();
            s.source = Some(n.vertex_name(n.source()).into());
            s.terminals = names(&mut n.terminals().iter().copied());
            s.intermediates = names(&mut n.intermediates());
            s.edge_order = n.edge_order().sequence().into_iter().map(|e| n.edge(e).id.clone()).collect();
            s.routing_fixable = names(&mut routing_fixable_vertices(n).into_iter());
            s.mu = Some(mu(n).0);
        }
    }
    s
}

pub fn validate(args: &ValidateArgs) -> Result<u8> {
    let (name, parsed) = parse_source(&args.net)?;
    let s = summarize(name, &parsed);
    if args.json {
        print_json(&s);
    } else if s.valid {
        print_table(&[
            ("network", s.network.clone()),
            ("valid", "yes".into()),
            ("vertices", s.vertices.to_string()),
            ("edges", s.edges.to_string()),
            ("source", s.source.clone().unwrap_or_default()),
            ("terminals", list(&s.terminals)),
            ("intermediates", list(&s.intermediates)),
            ("edge order", list(&s.edge_order)),
            ("routing-fixable", list(&s.routing_fixable)),
            ("mu", s.mu.map_or(String::new(), |m| m.to_string())),
        ]);
    } else {
        println!("network {} is invalid ({} problem(s)):", s.network, s.problems.len());
        for p in &s.problems {
            println!("  - {p}");
        }
    }
    Ok(if s.valid { OK } else { NO })
}

#[derive(Serialize)]
struct CutRow {
    terminal: String,
    cut: usize,
}

#[derive(Serialize)]
struct MincutReport {
    network: String,
    mu: usize,
    terminals: Vec<CutRow>,
}

pub fn mincut(args: &MincutArgs) -> Result<u8> {
    let (name, n) = load(&args.net)?;
    let terminals = match &args.terminal {
        Some(t) => vec![CutRow { terminal: t.clone(), cut: min_cut(&n, t)?.0 }],
        None => n
            .terminals()
            .iter()
            .map(|&t| CutRow { terminal: n.vertex_name(t).into(), cut: min_cut_at(&n, t).0 })
            .collect(),
    };
    let report = MincutReport { network: name, mu: mu(&n).0, terminals };
    if args.json {
        print_json(&report);
    } else {
        println!("network {}", report.network);
        let width = report.terminals.iter().map(|r| r.terminal.len()).max().unwrap_or(0).max(8);
        println!("{:<width$}  min-cut", "terminal");
        for r in &report.terminals {
            println!("{:<width$}  {}", r.terminal, r.cut);
        }
        println!("mu = {}", report.mu);
    }
    Ok(OK)
}

#[derive(Serialize)]
struct ModelReport {
    network: String,
    q: usize,
    code_size: usize,
    options: ModelOptions,
    stats: ModelStats,
    total_variables: usize,
    total_constraints: usize,
    files: Vec<String>,
}

pub fn model(args: &ModelArgs) -> Result<u8> {
    let (name, n) = load(&args.net)?;
    let a = alphabet(args.q, false, false)?;
    let mut opts = ModelOptions {
        routing_fix: !args.no_routing_fix,
        symmetry_break: !args.no_symmetry_break,
        ..ModelOptions::default()
    };
    if let Some(limit) = args.max_table_size {
        opts.max_table_size = limit;
    }
    let model = build_model(&n, &a, args.m, &opts)?.with_name(name.clone());
    let formats: &[Format] = match args.format {
        FormatArg::Lp => &[Format::Lp],
        FormatArg::Mps => &[Format::Mps],
        FormatArg::Both => &[Format::Lp, Format::Mps],
    };
    if args.stdout {
        for &f in formats {
            print!("{}", export_model(&model, f));
        }
        return Ok(OK);
    }
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let mut files = Vec::new();
    for &f in formats {
        let file = model_file_name(&name, args.q, args.m, &opts, f);
        let path = args.out_dir.join(&file);
        write_file(&path, &export_model(&model, f))?;
        write_file(&args.out_dir.join(format!("{file}.json")), &sidecar_json(&model, f, &file))?;
        files.push(path.display().to_string());
    }
    let stats = model.stats();
    let report = ModelReport {
        network: name,
        q: args.q,
        code_size: args.m,
        options: opts,
        total_variables: stats.total_vars(),
        total_constraints: stats.total_rows(),
        stats,
        files,
    };
    if args.json {
        print_json(&report);
    } else {
        let mut rows = vec![
            ("network", report.network.clone()),
            ("q", report.q.to_string()),
            ("M", report.code_size.to_string()),
        ];
        let kinds = list(report.stats.variables.iter().map(|(k, c)| format!("{k:?}={c}").to_lowercase()));
        let tags = list(report.stats.constraints.iter().map(|(t, c)| format!("{t}={c}")));
        rows.push(("variables", format!("{} ({kinds})", report.total_variables)));
        rows.push(("constraints", format!("{} ({tags})", report.total_constraints)));
        rows.push(("files", list(&report.files)));
        print_table(&rows);
    }
    Ok(OK)
}

#[derive(Serialize)]
struct SolveReport {
    network: String,
    q: usize,
    code_size: usize,
    outcome: &'static str,
    nodes: u64,
    wall_ms: u128,
    options: SearchOptions,
    verified: Option<bool>,
    certificate_file: Option<String>,
    certificate: Option<CertificateFile>,
}

pub fn solve(args: &SolveArgs) -> Result<u8> {
    let (name, n) = load(&args.net)?;
    let a = alphabet(args.q, args.field, args.linear)?;
    let opts = search_options(&args.search, args.linear)?;
    let d = decide_feasible(&n, &a, args.m, &opts)?;
    let (outcome, code) = match &d.outcome {
        Outcome::Feasible(_) => ("feasible", OK),
        Outcome::Infeasible => ("infeasible", NO),
        Outcome::Timeout => ("timeout", BOUNDS),
    };
    let mut report = SolveReport {
        network: name,
        q: args.q,
        code_size: args.m,
        outcome,
        nodes: d.nodes,
        wall_ms: d.elapsed.as_millis(),
        options: opts,
        verified: None,
        certificate_file: None,
        certificate: None,
    };
    if let Some(cert) = d.outcome.certificate() {
        report.verified = Some(verify_certificate(&n, cert)?.unambiguous);
        if let Some(path) = &args.certificate_out {
            write_file(path, &cert.to_json(&n))?;
            report.certificate_file = Some(path.display().to_string());
        }
        report.certificate = Some(cert.to_file(&n));
    }
    if args.json {
        print_json(&report);
    } else {
        let mut rows = vec![
            ("network", report.network.clone()),
            ("q", report.q.to_string()),
            ("M", report.code_size.to_string()),
            ("outcome", report.outcome.into()),
            ("nodes", report.nodes.to_string()),
            ("wall ms", report.wall_ms.to_string()),
        ];
        if let Some(v) = report.verified {
            rows.push(("verified", yes_no(v)));
        }
        if let Some(f) = &report.certificate_file {
            rows.push(("certificate", f.clone()));
        }
        print_table(&rows);
        if let (Some(cert), None) = (&report.certificate, &report.certificate_file) {
            println!("outer code: {}", list(cert.outer_code.iter().map(|w| format!("{w:?}"))));
        }
    }
    Ok(code)
}

/// Capacity report plus the CLI's own re-verification of the certificate.
#[derive(Serialize)]
pub struct CapacityReport {
    #[serde(flatten)]
    report: Report,
    certificate_size: usize,
    certificate_verified: bool,
    certificate_file: Option<String>,
}

pub fn capacity(args: &CapacityArgs, linear: bool) -> Result<u8> {
    let (name, n) = load(&args.net)?;
    let a = alphabet(args.q, args.field, linear)?;
    if linear && args.no_supersource {
        eprintln!("note: linear capacity never uses a supersource; --no-supersource has no effect");
    }
    let opts = CapacityOptions {
        search: search_options(&args.search, linear)?,
        supersource: !args.no_supersource,
        mode: if args.ascending { CapacityMode::Ascending { start: args.start } } else { CapacityMode::Descending },
        total_time: seconds("--total-time-limit", args.total_time_limit)?,
        ceiling: args.max_m,
    };
    let result = if linear { linear_max_code_size(&n, &a, &opts)? } else { max_code_size(&n, &a, &opts)? };
    let v = verify_certificate(&n, &result.certificate)?;
    let mut out = CapacityReport {
        report: result.report(&name, &opts),
        certificate_size: v.code_size,
        certificate_verified: v.unambiguous && v.code_size == result.lower && (!linear || v.linear == Some(true)),
        certificate_file: None,
    };
    if let Some(path) = &args.certificate_out {
        write_file(path, &result.certificate.to_json(&n))?;
        out.certificate_file = Some(path.display().to_string());
    }
    let json = serde_json::to_string_pretty(&out).expect("reports serialize");
    if let Some(path) = &args.report_out {
        write_file(path, &json)?;
    }
    if args.json {
        println!("{json}");
    } else {
        print_capacity(&out);
    }
    if !out.certificate_verified {
        bail!("internal error: the reported certificate does not verify");
    }
    Ok(if out.report.status == CapacityStatus::Proven { OK } else { BOUNDS })
}

fn print_capacity(out: &CapacityReport) {
    let r = &out.report;
    let status = match r.status {
        CapacityStatus::Proven => "proven",
        CapacityStatus::Bounds => "bounds",
    };
    let mut rows = vec![
        ("network", r.network.clone()),
        ("q", r.q.to_string()),
        ("linear", yes_no(r.linear)),
        ("mu", r.mu.to_string()),
        ("status", status.into()),
    ];
    match r.m_star {
        Some(m) => {
            rows.push(("M*", m.to_string()));
            rows.push(("capacity", r.capacity_text.clone()));
        }
        None => {
            rows.push(("M* in", format!("[{}, {}]", r.lower, r.upper)));
            rows.push(("capacity >=", r.capacity_text.clone()));
        }
    }
    rows.push(("supersource", yes_no(r.supersource)));
    rows.push(("certificate", format!("size {}, verified {}", out.certificate_size, yes_no(out.certificate_verified))));
    if let Some(f) = &out.certificate_file {
        rows.push(("certificate file", f.clone()));
    }
    rows.push(("nodes", r.nodes.to_string()));
    rows.push(("wall ms", r.wall_ms.to_string()));
    print_table(&rows);
    println!();
    println!("{:>6}  {:<10}  {:>12}  {:>9}", "M", "outcome", "nodes", "ms");
    for p in &r.probes {
        let outcome = serde_json::to_value(p.outcome).expect("serializes");
        println!("{:>6}  {:<10}  {:>12}  {:>9}", p.code_size, outcome.as_str().unwrap_or(""), p.nodes, p.wall_ms);
    }
}

#[derive(Serialize)]
struct VerifyReport {
    network: String,
    certificate: String,
    verified: bool,
    error: Option<String>,
    #[serde(flatten)]
    details: Option<Verification>,
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let (name, n) = load(&args.net)?;
    let text = read_file(&args.certificate)?;
    let mut report = VerifyReport {
        network: name,
        certificate: args.certificate.display().to_string(),
        verified: false,
        error: None,
        details: None,
    };
    match Certificate::from_json(&n, &text) {
        Err(e @ CertificateError::Syntax(_)) => return Err(e.into()),
        Err(e) => report.error = Some(e.to_string()),
        Ok(cert) => {
            let v = verify_certificate(&n, &cert)?;
            report.verified = v.unambiguous;
            report.details = Some(v);
        }
    }
    if args.json {
        print_json(&report);
    } else {
        print_verification(&report);
    }
    Ok(if report.verified { OK } else { NO })
}

fn print_verification(r: &VerifyReport) {
    let mut rows = vec![("network", r.network.clone()), ("certificate", r.certificate.clone())];
    rows.push(("unambiguous", yes_no(r.verified)));
    if let Some(e) = &r.error {
        rows.push(("error", e.clone()));
    }
    if let Some(v) = &r.details {
        rows.push(("q", v.q.to_string()));
        rows.push(("code size", v.code_size.to_string()));
        rows.push(("capacity", v.capacity.to_string()));
        if let Some(l) = v.linear {
            rows.push(("linear", yes_no(l)));
        }
        if let Some(Collision { terminal, first, second, received }) = &v.collision {
            rows.push(("collision", format!("{terminal} receives {received:?} for {first:?} and {second:?}")));
        }
    }
    print_table(&rows);
}

#[derive(Serialize)]
struct ExamplesReport {
    data_dir: Option<String>,
    networks: Vec<NetworkSummary>,
    certificates: Vec<String>,
    written: Vec<String>,
}

pub fn examples(args: &ExamplesArgs) -> Result<u8> {
    let mut report = ExamplesReport {
        data_dir: data_dir().map(|d| d.display().to_string()),
        networks: Vec::new(),
        certificates: Vec::new(),
        written: Vec::new(),
    };
    for spec in BUILTINS {
        let src = NetworkSource { network: None, builtin: Some(spec.into()) };
        let (name, parsed) = parse_source(&src)?;
        if let (Some(dir), Parsed::Valid(n)) = (&args.write, &parsed) {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = dir.join(format!("{name}.json"));
            write_file(&path, &n.to_json())?;
            report.written.push(path.display().to_string());
        }
        report.networks.push(summarize(spec.into(), &parsed));
    }
    if let Some(dir) = data_dir() {
        if let Ok(entries) = std::fs::read_dir(dir.join("certificates")) {
            let mut files: Vec<String> = entries
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .map(|p| p.display().to_string())
                .collect();
            files.sort();
            report.certificates = files;
        }
    }
    if args.json {
        print_json(&report);
        return Ok(OK);
    }
    println!("{:<18}  {:>8}  {:>5}  {:>9}  {:>2}", "builtin", "vertices", "edges", "terminals", "mu");
    for s in &report.networks {
        if !s.valid {
            println!("{:<18}  invalid: {}", s.network, s.problems.join("; "));
            continue;
        }
        let mu = s.mu.unwrap_or(0);
        println!("{:<18}  {:>8}  {:>5}  {:>9}  {:>2}", s.network, s.vertices, s.edges, s.terminals.len(), mu);
    }
    println!("(combination:n,k works for any n >= k >= 1)");
    if !report.certificates.is_empty() {
        println!();
        println!("certificates:");
        for c in &report.certificates {
            println!("  {c}");
        }
    }
    for w in &report.written {
        println!("wrote {w}");
    }
    Ok(OK)
}
