use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::Network;

use super::{Alphabet, AlphabetSpec, CodingError, FunctionTable, NetworkCode, OuterCode, Symbol};

/// Header stored in every certificate file, describing the table layout.
pub const CERTIFICATE_FORMAT: &str = "netcap-certificate/1: network_code[V] lists F_V row by row; \
rows are the input tuples over in(V) in lexicographic order (mixed radix base q, the first edge \
of in(V) in edge order is the most significant digit); each row holds |out(V)| symbols in the \
edge order of out(V)";

/// An explicit outer code and network code, re-checkable by simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub alphabet: Alphabet,
    pub outer_code: OuterCode,
    pub network_code: NetworkCode,
}

/// On-disk form of a [`Certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: String,
    pub alphabet: AlphabetSpec,
    pub outer_code: Vec<Vec<Symbol>>,
    pub network_code: BTreeMap<String, Vec<Symbol>>,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("certificate names unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("certificate does not fit the network: {0}")]
    Coding(#[from] CodingError),
}

impl Certificate {
    pub fn size(&self) -> usize {
        self.outer_code.len()
    }

    pub fn to_file(&self, n: &Network) -> CertificateFile {
        CertificateFile {
            format: CERTIFICATE_FORMAT.into(),
            alphabet: self.alphabet.spec(),
            outer_code: self.outer_code.words().to_vec(),
            network_code: self
                .network_code
                .tables()
                .map(|(v, t)| (n.vertex_name(v).to_string(), t.entries().to_vec()))
                .collect(),
        }
    }

    pub fn to_json(&self, n: &Network) -> String {
        serde_json::to_string_pretty(&self.to_file(n)).expect("certificate serializes")
    }

    /// Rebuilds a certificate against `n`. Shapes are checked; unambiguity
    /// is not (that is the verifier's job).
    pub fn from_file(n: &Network, file: &CertificateFile) -> Result<Certificate, CertificateError> {
        let alphabet = Alphabet::from_spec(&file.alphabet)?;
        let q = alphabet.q();
        let length = n.out_edges(n.source()).len();
        let outer_code = OuterCode::new(length, q, file.outer_code.clone())?;
        let mut tables = Vec::new();
        for (name, entries) in &file.network_code {
            let v = n
                .vertex_index(name)
                .ok_or_else(|| CertificateError::UnknownVertex(name.clone()))?;
            let (i, o) = (n.in_edges(v).len(), n.out_edges(v).len());
            tables.push((v, FunctionTable::new(q, i, o, entries.clone())?));
        }
        let network_code = NetworkCode::from_tables(n, q, tables)?;
        Ok(Certificate { alphabet, outer_code, network_code })
    }

    pub fn from_json(n: &Network, text: &str) -> Result<Certificate, CertificateError> {
        let file: CertificateFile = serde_json::from_str(text)?;
        Self::from_file(n, &file)
    }
}
