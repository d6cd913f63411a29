//! Line-oriented checkpoint files.
//!
//! ```text
//! mts-checkpoint 1 <app-name>
//! R <outputs-so-far>          (omitted when zero)
//! S <token-base64>            (one per shared item, in sequence order)
//! N <payload-base64>          (one per pending job, in list order)
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use thiserror::Error;

use crate::engine::{JobList, RunReport, SharedStore};
use crate::search::{JobNode, SharedToken};

pub const MAGIC: &str = "mts-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("cannot access checkpoint: {0}")]
    Io(#[from] io::Error),
    #[error("checkpoint line {line}: {msg}")]
    Corrupt { line: usize, msg: String },
    #[error("checkpoint version {found} is not supported (expected {VERSION})")]
    Version { found: String },
}

/// State recovered from a checkpoint.
#[derive(Debug, Clone, Default)]
pub struct Restored {
    pub app_name: String,
    pub joblist: JobList,
    pub store: SharedStore,
    /// Outputs counted before the checkpoint was taken.
    pub output_count: u64,
}

pub fn render(app_name: &str, joblist: &JobList, store: &SharedStore, report: &RunReport) -> String {
    let mut s = format!("{MAGIC} {VERSION} {app_name}\n");
    if report.total_output_count > 0 {
        s.push_str(&format!("R {}\n", report.total_output_count));
    }
    for t in store.items() {
        s.push_str("S ");
        s.push_str(&STANDARD.encode(&t.0));
        s.push('\n');
    }
    for n in joblist.iter() {
        s.push_str("N ");
        s.push_str(&STANDARD.encode(&n.payload));
        s.push('\n');
    }
    s
}

/// Writes via a temporary sibling file and a rename, so an interrupted
/// write never leaves a truncated checkpoint behind.
pub fn checkpoint_write(
    path: &Path,
    app_name: &str,
    joblist: &JobList,
    store: &SharedStore,
    report: &RunReport,
) -> io::Result<()> {
    let text = render(app_name, joblist, store, report);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn parse(text: &str) -> Result<Restored, CheckpointError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(CheckpointError::Corrupt {
        line: 1,
        msg: "empty file".into(),
    })?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(CheckpointError::Corrupt {
            line: 1,
            msg: format!("expected `{MAGIC}` header"),
        });
    }
    match fields.next() {
        Some(v) if v == VERSION.to_string() => {}
        Some(v) => return Err(CheckpointError::Version { found: v.into() }),
        None => {
            return Err(CheckpointError::Corrupt {
                line: 1,
                msg: "missing version".into(),
            })
        }
    }
    let app_name = fields
        .next()
        .ok_or(CheckpointError::Corrupt {
            line: 1,
            msg: "missing application name".into(),
        })?
        .to_string();

    let mut restored = Restored {
        app_name,
        ..Default::default()
    };
    let mut tokens = Vec::new();
    for (line, text) in lines {
        if text.trim().is_empty() {
            continue;
        }
        let corrupt = |msg: String| CheckpointError::Corrupt { line, msg };
        let (tag, rest) = text
            .split_once(' ')
            .ok_or_else(|| corrupt(format!("malformed line `{text}`")))?;
        match tag {
            "R" => {
                restored.output_count = rest
                    .trim()
                    .parse()
                    .map_err(|e| corrupt(format!("bad output count: {e}")))?
            }
            "S" => tokens.push(SharedToken(
                STANDARD
                    .decode(rest.trim())
                    .map_err(|e| corrupt(format!("bad shared token: {e}")))?,
            )),
            "N" => restored.joblist.push(JobNode::new(
                STANDARD
                    .decode(rest.trim())
                    .map_err(|e| corrupt(format!("bad node payload: {e}")))?,
                0,
            )),
            other => return Err(corrupt(format!("unknown record type `{other}`"))),
        }
    }
    restored.store = SharedStore::from_items(tokens);
    Ok(restored)
}

pub fn checkpoint_read(path: &Path) -> Result<Restored, CheckpointError> {
    parse(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    use proptest::prelude::*;

    #[test]
    fn empty_state_is_header_only() {
        let text = render("topsorts", &JobList::new(), &SharedStore::new(), &RunReport::default());
        assert_eq!(text, "mts-checkpoint 1 topsorts\n");
        let r = parse(&text).unwrap();
        assert!(r.joblist.is_empty());
        assert!(r.store.is_empty());
        assert_eq!(r.app_name, "topsorts");
    }

    #[test]
    fn three_nodes_read_back() {
        let text = "mts-checkpoint 1 x\nN AQ==\nN Ag==\nN Aw==\n";
        let r = parse(text).unwrap();
        assert_eq!(r.joblist.len(), 3);
        let payloads: Vec<_> = r.joblist.iter().map(|n| n.payload.clone()).collect();
        assert_eq!(payloads, vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn tampered_payload_names_line() {
        let text = "mts-checkpoint 1 x\nS AQ==\nN AQ==\nN !!notbase64\n";
        match parse(text) {
            Err(CheckpointError::Corrupt { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_version_rejected() {
        assert!(matches!(
            parse("mts-checkpoint 2 x\n"),
            Err(CheckpointError::Version { .. })
        ));
        assert!(matches!(
            parse("something else\n"),
            Err(CheckpointError::Corrupt { line: 1, .. })
        ));
    }

    #[test]
    fn write_and_read_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck");
        let jobs = JobList::from_iter([JobNode::new(vec![0, 1, 2], 4)]);
        let store = SharedStore::from_items([SharedToken(vec![9])]);
        let report = RunReport {
            total_output_count: 17,
            ..Default::default()
        };
        checkpoint_write(&path, "app", &jobs, &store, &report).unwrap();
        let r = checkpoint_read(&path).unwrap();
        assert_eq!(r.output_count, 17);
        assert_eq!(r.joblist.iter().next().unwrap().payload, vec![0, 1, 2]);
        assert_eq!(r.store.items(), store.items());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("ck");
        let r = checkpoint_write(&path, "a", &JobList::new(), &SharedStore::new(), &RunReport::default());
        assert!(r.is_err());
    }

    proptest! {
        #[test]
        fn round_trip(
            jobs in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..16), 0..20),
            tokens in prop::collection::vec(prop::collection::vec(any::<u8>(), 1..8), 0..10),
            count in any::<u64>(),
        ) {
            let list: JobList = jobs.iter().map(|p| JobNode::new(p.clone(), 0)).collect();
            let store = SharedStore::from_items(tokens.into_iter().map(SharedToken));
            let report = RunReport { total_output_count: count, ..Default::default() };
            let r = parse(&render("app", &list, &store, &report)).unwrap();
            prop_assert_eq!(r.joblist, list);
            prop_assert_eq!(r.store.items(), store.items());
            prop_assert_eq!(r.output_count, count);
        }
    }
}
