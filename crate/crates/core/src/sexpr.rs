//! Tokenizer and reader for the parenthesized notation shared by feature
//! structure files, rule files and the lexicon.

use std::fmt;

/// Line/column of a token, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    Text(String, Pos),
    List(Vec<Sexp>, Pos),
    Bracket(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Text(_, p) | Sexp::List(_, p) | Sexp::Bracket(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Sexp::Atom(..) => "atom",
            Sexp::Text(..) => "quoted text",
            Sexp::List(..) => "list",
            Sexp::Bracket(..) => "bracketed list",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { pos, message: message.into() }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader { chars: text.chars().peekable(), pos: Pos { line: 1, col: 1 } }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() || c == '\u{feff}' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, SyntaxError> {
        self.skip_trivia();
        let start = self.pos;
        let Some(&c) = self.chars.peek() else { return Ok(None) };
        match c {
            '(' | '[' => {
                self.bump();
                let close = if c == '(' { ')' } else { ']' };
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(SyntaxError::new(start, format!("unclosed '{c}'")));
                        }
                        Some(&d) if d == close => {
                            self.bump();
                            break;
                        }
                        Some(&d) if d == ')' || d == ']' => {
                            return Err(SyntaxError::new(
                                self.pos,
                                format!("expected '{close}', found '{d}'"),
                            ));
                        }
                        Some(_) => {
                            if let Some(item) = self.read()? {
                                items.push(item);
                            }
                        }
                    }
                }
                Ok(Some(if c == '(' { Sexp::List(items, start) } else { Sexp::Bracket(items, start) }))
            }
            ')' | ']' => Err(SyntaxError::new(start, format!("unexpected '{c}'"))),
            '"' => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(SyntaxError::new(start, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(e @ ('"' | '\\')) => text.push(e),
                            Some(e) => {
                                return Err(SyntaxError::new(
                                    self.pos,
                                    format!("unknown escape '\\{e}'"),
                                ))
                            }
                            None => return Err(SyntaxError::new(start, "unterminated string")),
                        },
                        Some(ch) => text.push(ch),
                    }
                }
                Ok(Some(Sexp::Text(text, start)))
            }
            _ => {
                let mut tok = String::new();
                while let Some(&d) = self.chars.peek() {
                    if d.is_whitespace() || matches!(d, '(' | ')' | '[' | ']' | '"' | ';') {
                        break;
                    }
                    tok.push(d);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(tok, start)))
            }
        }
    }
}

/// Reads every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(item) = reader.read()? {
        out.push(item);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_comments() {
        let items = read_all("; header\n((a x) [b \"c d\"]) ; trailing\n").unwrap();
        assert_eq!(items.len(), 1);
        let list = items[0].as_list().unwrap();
        assert_eq!(list.len(), 2);
        assert!(matches!(list[1], Sexp::Bracket(..)));
    }

    #[test]
    fn string_escapes() {
        let items = read_all(r#""a \"b\" \\ c""#).unwrap();
        assert_eq!(items[0], Sexp::Text("a \"b\" \\ c".into(), Pos { line: 1, col: 1 }));
    }

    #[test]
    fn reports_positions() {
        let err = read_all("(a\n  (b c)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 1 });
        let err = read_all("(a ]").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 4 });
    }
}
