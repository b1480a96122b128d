use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value;

/// One problem found while reading a configuration, 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

/// Every issue found in a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
    pub column: usize,
}

/// Sections in file order of first appearance, `""` for keys before any header.
#[derive(Clone, Debug, Default)]
pub(crate) struct RawConfig {
    pub sections: BTreeMap<String, (usize, Vec<Entry>)>,
}

impl RawConfig {
    pub fn section(&self, name: &str) -> &[Entry] {
        self.sections.get(name).map(|(_, e)| e.as_slice()).unwrap_or(&[])
    }
}

pub(crate) const SECTIONS: [&str; 4] = ["system", "params", "assert", "output"];

/// Position of the first `#` outside a JSON string, if any.
fn comment_start(line: &str) -> Option<usize> {
    let mut in_string = false;
    let mut escaped = false;
    for (i, ch) in line.char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
        } else if ch == '"' {
            in_string = true;
        } else if ch == '#' {
            return Some(i);
        }
    }
    None
}

fn valid_key(key: &str) -> bool {
    let mut chars = key.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

pub(crate) fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    let mut issues = Vec::new();
    let mut current = String::new();
    raw.sections.insert(String::new(), (0, Vec::new()));

    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = match comment_start(full) {
            Some(cut) => &full[..cut],
            None => full,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = body.len() - body.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                issues.push(ConfigIssue {
                    line: line_no,
                    column: column_of(full, lead + trimmed.len()),
                    message: "section header is missing the closing ']'".into(),
                });
                continue;
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                issues.push(ConfigIssue {
                    line: line_no,
                    column: column_of(full, lead + 1),
                    message: format!("unknown section [{name}], expected one of {}", SECTIONS.join(", ")),
                });
                current = String::from("\u{0}ignored");
                continue;
            }
            if raw.sections.contains_key(name) {
                issues.push(ConfigIssue {
                    line: line_no,
                    column: column_of(full, lead + 1),
                    message: format!("section [{name}] appears twice"),
                });
            } else {
                raw.sections.insert(name.to_string(), (line_no, Vec::new()));
            }
            current = name.to_string();
            continue;
        }
        let Some(eq) = body.find('=') else {
            issues.push(ConfigIssue {
                line: line_no,
                column: column_of(full, lead),
                message: "expected `key = value` or a [section] header".into(),
            });
            continue;
        };
        let key = body[..eq].trim();
        if !valid_key(key) {
            issues.push(ConfigIssue {
                line: line_no,
                column: column_of(full, lead),
                message: format!("invalid key {key:?}"),
            });
            continue;
        }
        let value_text = &body[eq + 1..];
        let value_lead = eq + 1 + (value_text.len() - value_text.trim_start().len());
        let value_text = value_text.trim();
        if value_text.is_empty() {
            issues.push(ConfigIssue {
                line: line_no,
                column: column_of(full, value_lead),
                message: format!("missing value for {key}"),
            });
            continue;
        }
        let value = match serde_json::from_str::<Value>(value_text) {
            Ok(v) => v,
            Err(e) => {
                // serde_json columns are 1-based within the value text.
                let offset = value_text.chars().take(e.column().saturating_sub(1)).map(char::len_utf8).sum::<usize>();
                issues.push(ConfigIssue {
                    line: line_no,
                    column: column_of(full, value_lead + offset.min(value_text.len())),
                    message: format!("invalid JSON value for {key}: {e}"),
                });
                continue;
            }
        };
        let Some((_, entries)) = raw.sections.get_mut(&current) else {
            continue;
        };
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            issues.push(ConfigIssue {
                line: line_no,
                column: column_of(full, lead),
                message: format!("duplicate key {key} (first set on line {})", prev.line),
            });
            continue;
        }
        entries.push(Entry { key: key.to_string(), value, line: line_no, column: column_of(full, value_lead) });
    }

    if issues.is_empty() {
        Ok(raw)
    } else {
        Err(ConfigError { issues })
    }
}

/// Compact JSON for one value on one line.
pub(crate) fn inline(v: &Value) -> String {
    serde_json::to_string(v).expect("json value serializes")
}
