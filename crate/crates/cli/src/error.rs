use crate::problem::Located;

/// Problems with the input; all map to exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(Located),
    #[error("{at}")]
    Unresolved { kind: String, id: String, at: Located },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}
