//! Script syntax: one command per statement, statements end at a line end
//! outside quotes, optionally with `:`, `::` (verbose) or `;`. Lines
//! starting with `#` are comments.

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    /// 1-based line where the statement starts.
    pub line: usize,
    pub text: String,
    pub verbose: bool,
}

pub fn split(source: &str) -> Result<Vec<Statement>, CliError> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut start = 0;
    for (i, line) in source.lines().enumerate() {
        if buf.is_empty() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            start = i + 1;
        } else {
            buf.push('\n');
        }
        buf.push_str(line);
        if buf.matches('"').count() % 2 == 1 {
            continue;
        }
        out.push(finish(start, &buf));
        buf.clear();
    }
    if !buf.is_empty() {
        return Err(CliError::Command(format!(
            "line {start}: unterminated string"
        )));
    }
    Ok(out)
}

fn finish(line: usize, raw: &str) -> Statement {
    // Cut a trailing comment that sits outside quotes.
    let mut quoted = false;
    let mut end = raw.len();
    for (i, c) in raw.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => {
                end = i;
                break;
            }
            _ => {}
        }
    }
    let mut text = raw[..end].trim_end();
    let mut verbose = false;
    if let Some(t) = text.strip_suffix("::") {
        text = t;
        verbose = true;
    } else if let Some(t) = text.strip_suffix(':').or_else(|| text.strip_suffix(';')) {
        text = t;
    }
    Statement {
        line,
        text: text.trim().to_string(),
        verbose,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Word(String),
    /// Contents of `"..."`.
    Quoted(String),
    /// Contents of `{...}`.
    Brace(String),
    /// Contents of `[...]`.
    Bracket(String),
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, CliError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let closing = match c {
            '"' => Some('"'),
            '{' => Some('}'),
            '[' => Some(']'),
            _ => None,
        };
        if let Some(close) = closing {
            chars.next();
            let mut body = String::new();
            loop {
                match chars.next() {
                    Some(x) if x == close => break,
                    Some(x) => body.push(x),
                    None => return Err(CliError::Command(format!("missing `{close}`"))),
                }
            }
            out.push(match c {
                '"' => Token::Quoted(body),
                '{' => Token::Brace(body),
                _ => Token::Bracket(body),
            });
        } else {
            let mut word = String::new();
            while let Some(&x) = chars.peek() {
                if x.is_whitespace() || matches!(x, '"' | '{' | '[') {
                    break;
                }
                word.push(x);
                chars.next();
            }
            out.push(Token::Word(word));
        }
    }
    Ok(out)
}
