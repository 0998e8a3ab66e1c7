//! Rules text files: one canonical notation per line. Blank lines and lines
//! starting with `#` are ignored, except a leading `# label: …` line which
//! carries the rule set label.

use std::path::Path;

use super::{read_file, write_atomic, FormatError};
use crate::rules::{Rule, RuleSet};

const LABEL_PREFIX: &str = "# label: ";

pub fn format_rules(set: &RuleSet) -> String {
    let mut out = String::new();
    if !set.label.is_empty() {
        out.push_str(LABEL_PREFIX);
        out.push_str(&set.label.replace('\n', " "));
        out.push('\n');
    }
    for rule in &set.rules {
        out.push_str(&rule.notation());
        out.push('\n');
    }
    out
}

pub fn parse_rules(text: &str) -> Result<RuleSet, FormatError> {
    let mut set = RuleSet::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(label) = line.strip_prefix(LABEL_PREFIX.trim_end()) {
            if set.label.is_empty() && set.rules.is_empty() {
                set.label = label.trim().to_string();
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = Rule::parse(line).map_err(|source| FormatError::Rule { line: i + 1, source })?;
        set.rules.push(rule);
    }
    Ok(set)
}

pub fn write_rules(path: &Path, set: &RuleSet) -> Result<(), FormatError> {
    write_atomic(path, format_rules(set).as_bytes())
}

pub fn read_rules(path: &Path) -> Result<RuleSet, FormatError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|e| FormatError::Format {
        offset: e.utf8_error().valid_up_to() as u64,
        reason: "not UTF-8".into(),
    })?;
    parse_rules(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::sample_rules;

    #[test]
    fn round_trip() {
        let set = sample_rules(20, 2, 4).unwrap();
        assert_eq!(parse_rules(&format_rules(&set)).unwrap(), set);
    }

    #[test]
    fn comments_and_blanks() {
        let set = parse_rules("# a comment\n\nB3/S23\n  # indented\nB36/S23 n=3\n").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.label, "");
    }

    #[test]
    fn bad_line_is_reported() {
        match parse_rules("B3/S23\nB9/S1\n") {
            Err(FormatError::Rule { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
