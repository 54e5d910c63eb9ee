use serde::Serialize;
use serde_json::Value;

/// Resolved configuration of one invocation, echoed into every output.
///
/// Worker count and output locations are left out: neither changes what is
/// computed, and leaving them out keeps outputs byte-identical across
/// `--threads` settings and output directories.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Value,
}

impl RunManifest {
    pub fn new<A: Serialize>(command: &'static str, args: &A) -> anyhow::Result<Self> {
        Ok(RunManifest {
            tool: "mst",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: serde_json::to_value(args)?,
        })
    }

    /// One-line JSON form for `# ` comment headers.
    pub fn comment(&self) -> String {
        serde_json::to_string(self).expect("manifest is plain JSON")
    }

    /// `body` serialized as a JSON object with a leading `manifest` field.
    pub fn wrap<T: Serialize>(&self, body: &T) -> anyhow::Result<String> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            manifest: &'a RunManifest,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Wrapped { manifest: self, body })?;
        text.push('\n');
        Ok(text)
    }
}
