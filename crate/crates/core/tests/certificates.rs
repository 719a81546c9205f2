use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use netcap::coding::{
    is_linear, make_alphabet, transmit, Certificate, CertificateError, CodingError, FunctionTable, NetworkCode,
    OuterCode, Symbol,
};
use netcap::network::{add_supersource, builtin_network, Builtin, EdgeOrder, Network};
use netcap::search::{decide_feasible, derive_from_supersource, verify_certificate, verify_certificate_json, SearchOptions};

fn data(file: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", "certificates", file].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn butterfly_example_certificate() {
    let n = builtin_network(&Builtin::Butterfly).unwrap();
    let cert = Certificate::from_json(&n, &data("butterfly_f3_example.json")).unwrap();
    let v = verify_certificate(&n, &cert).unwrap();
    assert!(v.unambiguous);
    assert_eq!(v.code_size, 9);
    assert_eq!(v.linear, Some(true));
    assert_eq!(v.capacity.value, 2.0);
    let tr = transmit(&n, &cert.network_code, &[1, 2]).unwrap();
    let t1 = n.vertex_index("T1").unwrap();
    assert_eq!(tr.received(&n, t1), [2, 0]);
}

#[test]
fn latin_linear_maps() {
    let n = builtin_network(&Builtin::Latin).unwrap();
    for (file, q) in [("latin_f3_linear.json", 3), ("latin_f4_linear.json", 4)] {
        let cert = Certificate::from_json(&n, &data(file)).unwrap();
        let v = verify_certificate(&n, &cert).unwrap();
        assert!(v.unambiguous, "{file}");
        assert_eq!(v.linear, Some(true), "{file}");
        assert_eq!((v.q, v.code_size), (q, q * q));
    }
    // the maps themselves: V3 = a + 2b over F3, V3 = alpha*a + b over F4 (alpha = 2)
    let f3 = Certificate::from_json(&n, &data("latin_f3_linear.json")).unwrap();
    let v3 = n.vertex_index("V3").unwrap();
    assert_eq!(f3.network_code.table(v3).unwrap().apply(&[1, 1], 3), [0]);
    let f4 = Certificate::from_json(&n, &data("latin_f4_linear.json")).unwrap();
    assert_eq!(f4.network_code.table(v3).unwrap().apply(&[1, 0], 4), [2]);
    let v4 = n.vertex_index("V4").unwrap();
    assert_eq!(f4.network_code.table(v4).unwrap().apply(&[1, 0], 4), [3]);
}

#[test]
fn latin_size_34_over_six_symbols_verifies_quickly() {
    let n = builtin_network(&Builtin::Latin).unwrap();
    let text = data("latin_q6_m34.json");
    let start = Instant::now();
    let v = verify_certificate_json(&n, &text).unwrap();
    let elapsed = start.elapsed();
    assert!(v.unambiguous);
    assert_eq!((v.q, v.code_size), (6, 34));
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");
}

#[test]
fn repeated_codewords_are_rejected() {
    let n = builtin_network(&Builtin::Butterfly).unwrap();
    let mut file = Certificate::from_json(&n, &data("butterfly_f3_example.json")).unwrap().to_file(&n);
    file.outer_code[1] = file.outer_code[0].clone();
    let text = serde_json::to_string(&file).unwrap();
    assert!(matches!(
        verify_certificate_json(&n, &text),
        Err(CertificateError::Coding(CodingError::RepeatedCodeword(_)))
    ));
}

#[test]
fn supersource_certificates_transfer() {
    let n = builtin_network(&Builtin::Combination { n: 5, k: 2 }).unwrap();
    let sup = add_supersource(&n);
    for q in [2, 3, 4] {
        let a = make_alphabet(q, false).unwrap();
        // the full space A^mu on the supersource network, when it is achievable
        let m = if q == 4 { 16 } else { 2 };
        let d = decide_feasible(&sup, &a, m, &SearchOptions::default()).unwrap();
        let cert = d.outcome.certificate().expect("feasible");
        let derived = derive_from_supersource(&n, &sup, cert).unwrap();
        assert_eq!(derived.size(), m);
        assert!(verify_certificate(&n, &derived).unwrap().unambiguous);
    }
}

/// Builds the example code from rules keyed by edge id, so that the same
/// code can be laid out under any edge order.
fn example_code(n: &Network) -> NetworkCode {
    let f = make_alphabet(3, true).unwrap().field().unwrap().clone();
    let rule = |v: &str, input: &BTreeMap<&str, Symbol>| -> BTreeMap<&'static str, Symbol> {
        let one = |e: &str| input[e];
        match v {
            "V1" => BTreeMap::from([("e3", f.mul(2, one("e1"))), ("e4", one("e1"))]),
            "V2" => BTreeMap::from([("e5", one("e2")), ("e6", f.mul(2, one("e2")))]),
            "V3" => BTreeMap::from([("e7", f.add(one("e4"), one("e5")))]),
            _ => BTreeMap::from([("e8", one("e7")), ("e9", one("e7"))]),
        }
    };
    let tables = n
        .intermediates()
        .map(|v| {
            let ins: Vec<&str> = n.in_edges(v).iter().map(|&e| n.edge(e).id.as_str()).collect();
            let outs: Vec<&str> = n.out_edges(v).iter().map(|&e| n.edge(e).id.as_str()).collect();
            let table = FunctionTable::from_fn(3, ins.len(), outs.len(), |m| {
                let input: BTreeMap<&str, Symbol> = ins.iter().copied().zip(m.iter().copied()).collect();
                let out = rule(n.vertex_name(v), &input);
                outs.iter().map(|e| out[e]).collect()
            });
            (v, table)
        })
        .collect();
    NetworkCode::from_tables(n, 3, tables).unwrap()
}

#[test]
fn terminal_outputs_do_not_depend_on_the_order_extension() {
    let n = builtin_network(&Builtin::Butterfly).unwrap();
    let id = |s: &str| n.edge_index(s).unwrap();
    let alternatives = [
        ["e2", "e1", "e6", "e5", "e4", "e3", "e7", "e9", "e8"],
        ["e1", "e3", "e4", "e2", "e5", "e7", "e6", "e8", "e9"],
    ];
    let reference = example_code(&n);
    let t1 = n.vertex_index("T1").unwrap();
    let mut compared = 0;
    for alt in alternatives {
        let seq: Vec<usize> = alt.iter().map(|&e| id(e)).collect();
        let other = n.with_edge_order(EdgeOrder::from_sequence(&seq)).unwrap();
        assert_ne!(other.edge_order(), n.edge_order());
        let code = example_code(&other);
        for x in OuterCode::full_space(2, 3).words() {
            // the source tuple follows out(S) order, so map it by edge id
            let by_id = |net: &Network, word: &[Symbol]| -> BTreeMap<String, Symbol> {
                net.out_edges(net.source()).iter().map(|&e| net.edge(e).id.clone()).zip(word.iter().copied()).collect()
            };
            let ids = by_id(&n, x);
            let y: Vec<Symbol> =
                other.out_edges(other.source()).iter().map(|&e| ids[&other.edge(e).id]).collect();
            let a = transmit(&n, &reference, x).unwrap();
            let b = transmit(&other, &code, &y).unwrap();
            for &t in n.terminals() {
                let got = |net: &Network, tr: &netcap::coding::Transcript| -> BTreeMap<String, Symbol> {
                    net.in_edges(t).iter().map(|&e| (net.edge(e).id.clone(), tr.symbol(e))).collect()
                };
                assert_eq!(got(&n, &a), got(&other, &b));
            }
            compared += 1;
        }
        let source = BTreeMap::from([("e1", 1), ("e2", 2)]);
        let x: Vec<Symbol> =
            other.out_edges(other.source()).iter().map(|&e| source[other.edge(e).id.as_str()]).collect();
        let tr = transmit(&other, &code, &x).unwrap();
        let received: BTreeMap<&str, Symbol> =
            other.in_edges(t1).iter().map(|&e| (other.edge(e).id.as_str(), tr.symbol(e))).collect();
        assert_eq!(received, BTreeMap::from([("e3", 2), ("e8", 0)]));
    }
    assert_eq!(compared, 18);
    assert!(is_linear(&reference, &make_alphabet(3, true).unwrap()).unwrap());
}
