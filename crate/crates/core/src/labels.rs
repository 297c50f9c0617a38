//! Ground-truth annotations: `user_id,label` with 1 = bot, 0 = not.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Human,
    Bot,
}

impl Label {
    pub fn code(self) -> u8 {
        match self {
            Label::Human => 0,
            Label::Bot => 1,
        }
    }

    pub fn is_bot(self) -> bool {
        self == Label::Bot
    }
}

/// Ordered id → label map.
pub type Labels = BTreeMap<String, Label>;

pub fn load_labels(path: &Path) -> Result<Labels> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Labels::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("user_id")) {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let (id, label) = line
            .split_once(',')
            .ok_or_else(|| parse_err(format!("expected `user_id,label`, got `{line}`")))?;
        let label = match label.trim() {
            "1" => Label::Bot,
            "0" => Label::Human,
            other => return Err(parse_err(format!("label must be 0 or 1, got `{other}`"))),
        };
        labels.insert(id.trim().to_string(), label);
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    Ok(labels)
}

/// Writes labels in the given id order.
pub fn write_labels<'a, I>(path: &Path, rows: I) -> Result<()>
where
    I: IntoIterator<Item = (&'a str, Label)>,
{
    let mut out = String::from("user_id,label\n");
    for (id, label) in rows {
        out.push_str(id);
        out.push(',');
        out.push_str(&label.code().to_string());
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        write_labels(&p, [("a", Label::Bot), ("b", Label::Human)]).unwrap();
        let l = load_labels(&p).unwrap();
        assert_eq!(l["a"], Label::Bot);
        assert_eq!(l["b"], Label::Human);

        std::fs::write(&p, "user_id,label\na,2\n").unwrap();
        assert!(matches!(load_labels(&p), Err(Error::Parse { line: 2, .. })));
    }
}
