//! Pull a function's source text out of a Rust file.

/// Return the full text of the first `fn name` item in `source`, from its
/// leading doc comments and attributes through the closing brace.
pub fn extract_fn(source: &str, name: &str) -> Option<String> {
    let lines: Vec<&str> = source.lines().collect();
    let start = lines.iter().position(|l| declares_fn(l, name))?;

    let mut first = start;
    while first > 0 {
        let prev = lines[first - 1].trim_start();
        if prev.starts_with("///") || prev.starts_with("#[") {
            first -= 1;
        } else {
            break;
        }
    }

    let body_from: usize = lines[..start].iter().map(|l| l.len() + 1).sum();
    let end = matching_brace_end(&source[body_from..])? + body_from;
    let snippet_start: usize = lines[..first].iter().map(|l| l.len() + 1).sum();
    Some(dedent(&source[snippet_start..end]))
}

fn declares_fn(line: &str, name: &str) -> bool {
    let trimmed = line.trim_start();
    let rest = trimmed
        .strip_prefix("pub(crate) ")
        .or_else(|| trimmed.strip_prefix("pub "))
        .unwrap_or(trimmed);
    rest.strip_prefix("fn ")
        .and_then(|r| r.strip_prefix(name))
        .is_some_and(|r| r.starts_with('(') || r.starts_with('<'))
}

/// Byte offset just past the brace closing the first block opened in `text`.
/// String literals, char literals and line comments are skipped.
fn matching_brace_end(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut opened = false;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'"' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
            }
            b'\'' => {
                // char literal such as '{' or '\n'; lifetimes have no closing quote nearby
                if bytes.get(i + 2) == Some(&b'\'') {
                    i += 2;
                } else if bytes.get(i + 1) == Some(&b'\\') && bytes.get(i + 3) == Some(&b'\'') {
                    i += 3;
                }
            }
            b'{' => {
                depth += 1;
                opened = true;
            }
            b'}' => {
                depth = depth.checked_sub(1)?;
                if opened && depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

fn dedent(text: &str) -> String {
    let indent = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    text.lines()
        .map(|l| {
            if l.len() >= indent {
                &l[indent..]
            } else {
                l.trim_start()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
