//! The declarative problem-file format.
//!
//! ```text
//! ring { vars = 2 }
//! lie_rinehart L { anchor = [[1, 0], [x, y]], brackets = { (1,2) -> [1, 0] } }
//! cochain f { on = Der, values = { (1,2) -> x } }
//! dlie T { from = (L, f) }
//! connection rho { dlie = T, gamma = [[[0,1],[0,0]], [[0,0],[y,0]]], psi = Id }
//! tasks {
//!   check-axioms T samples=50
//!   nf T kind=utensor-tilde expr="u2 ⊗ u1"
//! }
//! ```
//!
//! Values are atoms, bracketed lists or `{ key -> value }` maps. A newline
//! or comma at bracket depth zero ends a field; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

/// A parse or resolution problem located in the source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub line: usize,
    pub column: usize,
    pub msg: String,
}

impl fmt::Display for Located {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.msg)
    }
}

/// Maps byte offsets to `(line, column)`, both 1-based.
#[derive(Clone, Debug)]
pub struct SourceMap {
    line_starts: Vec<usize>,
}

impl SourceMap {
    pub fn new(src: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        SourceMap { line_starts }
    }

    pub fn locate(&self, offset: usize, msg: impl Into<String>) -> Located {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        Located { line, column: offset - self.line_starts[line - 1] + 1, msg: msg.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Atom { text: String, offset: usize },
    List { items: Vec<Value>, offset: usize },
    Map { entries: Vec<(Value, Value)>, offset: usize },
}

impl Value {
    pub fn offset(&self) -> usize {
        match self {
            Value::Atom { offset, .. } | Value::List { offset, .. } | Value::Map { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub key: String,
    pub value: Value,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub kind: String,
    pub name: String,
    pub fields: Vec<Field>,
    pub offset: usize,
}

impl Block {
    pub fn field(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }
}

/// One line of the `tasks` block: `name [target] key=value ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub name: String,
    pub target: Option<String>,
    pub options: BTreeMap<String, String>,
    pub offset: usize,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub nvars: usize,
    pub blocks: Vec<Block>,
    pub tasks: Vec<TaskSpec>,
    pub source: SourceMap,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    map: SourceMap,
}

type PResult<T> = Result<T, Located>;

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, msg: impl Into<String>) -> PResult<T> {
        Err(self.map.locate(offset, msg))
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_comment(&mut self) {
        if self.peek() == Some('#') {
            while let Some(c) = self.peek() {
                if c == '\n' {
                    break;
                }
                self.bump();
            }
        }
    }

    /// Skips blanks, comments and, if `newlines`, line breaks.
    fn skip(&mut self, newlines: bool) {
        loop {
            match self.peek() {
                Some('#') => self.skip_comment(),
                Some('\n') if newlines => {
                    self.bump();
                }
                Some(c) if c.is_whitespace() && c != '\n' => {
                    self.bump();
                }
                _ => break,
            }
        }
    }

    fn ident(&mut self) -> PResult<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '\'' {
                self.bump();
            } else {
                break;
            }
        }
        if start == self.pos {
            return self.err(start, "expected an identifier");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip(true);
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.err(self.pos, format!("expected '{c}'"))
        }
    }

    fn file(&mut self) -> PResult<ProblemFile> {
        let mut nvars = None;
        let mut blocks = Vec::new();
        let mut tasks = Vec::new();
        loop {
            self.skip(true);
            if self.peek().is_none() {
                break;
            }
            let start = self.pos;
            let kind = self.ident()?;
            self.skip(false);
            match kind.as_str() {
                "ring" => {
                    let fields = self.body()?;
                    let Some(f) = fields.iter().find(|f| f.key == "vars") else {
                        return self.err(start, "ring block needs 'vars'");
                    };
                    match &f.value {
                        Value::Atom { text, offset } => match text.parse::<usize>() {
                            Ok(n) => nvars = Some(n),
                            Err(_) => return self.err(*offset, format!("'{text}' is not a variable count")),
                        },
                        v => return self.err(v.offset(), "variable count must be a number"),
                    }
                }
                "tasks" => tasks.extend(self.tasks()?),
                "lie_rinehart" | "cochain" | "cocycle" | "dlie" | "connection" | "projective_basis" | "morphism" => {
                    let name = self.ident()?;
                    let fields = self.body()?;
                    let kind = if kind == "cocycle" { "cochain".to_string() } else { kind };
                    blocks.push(Block { kind, name, fields, offset: start });
                }
                other => return self.err(start, format!("unknown block '{other}'")),
            }
        }
        let Some(nvars) = nvars else {
            return self.err(0, "missing ring block");
        };
        Ok(ProblemFile { nvars, blocks, tasks, source: self.map.clone() })
    }

    fn body(&mut self) -> PResult<Vec<Field>> {
        self.expect('{')?;
        let mut fields = Vec::new();
        loop {
            self.skip(true);
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(fields);
                }
                Some(',') => {
                    self.bump();
                }
                None => return self.err(self.pos, "unterminated block"),
                _ => {
                    let offset = self.pos;
                    let key = self.ident()?;
                    self.skip(false);
                    let value = if self.peek() == Some('=') {
                        self.bump();
                        self.skip(false);
                        self.value(&[',', '\n', '}'])?
                    } else {
                        // A bare word is a flag.
                        Value::Atom { text: String::new(), offset }
                    };
                    fields.push(Field { key, value, offset });
                }
            }
        }
    }

    fn value(&mut self, stops: &[char]) -> PResult<Value> {
        self.skip(false);
        let offset = self.pos;
        match self.peek() {
            Some('[') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip(true);
                    match self.peek() {
                        Some(']') => {
                            self.bump();
                            return Ok(Value::List { items, offset });
                        }
                        Some(',') => {
                            self.bump();
                        }
                        None => return self.err(offset, "unterminated list"),
                        _ => items.push(self.value(&[',', ']', '\n'])?),
                    }
                }
            }
            Some('{') => {
                self.bump();
                let mut entries = Vec::new();
                loop {
                    self.skip(true);
                    match self.peek() {
                        Some('}') => {
                            self.bump();
                            return Ok(Value::Map { entries, offset });
                        }
                        Some(',') => {
                            self.bump();
                        }
                        None => return self.err(offset, "unterminated map"),
                        _ => {
                            let key = self.atom(&["->"], &[])?;
                            if !self.src[self.pos..].starts_with("->") {
                                return self.err(self.pos, "expected '->'");
                            }
                            self.pos += 2;
                            self.skip(false);
                            let value = self.value(&[',', '}', '\n'])?;
                            entries.push((key, value));
                        }
                    }
                }
            }
            _ => self.atom(&[], stops),
        }
    }

    /// Raw text up to a stop character (or string) at parenthesis depth 0.
    fn atom(&mut self, stop_strs: &[&str], stops: &[char]) -> PResult<Value> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            let rest = &self.src[self.pos..];
            let Some(c) = rest.chars().next() else { break };
            if depth == 0 && (stops.contains(&c) || stop_strs.iter().any(|s| rest.starts_with(s)) || c == '#') {
                break;
            }
            if depth == 0 && c == '\n' {
                break;
            }
            match c {
                '(' => depth += 1,
                ')' => {
                    if depth == 0 {
                        return self.err(self.pos, "unbalanced ')'");
                    }
                    depth -= 1
                }
                _ => {}
            }
            self.bump();
        }
        if depth != 0 {
            return self.err(start, "unbalanced '('");
        }
        let raw = &self.src[start..self.pos];
        let lead = raw.len() - raw.trim_start().len();
        let text = raw.trim().to_string();
        if text.is_empty() {
            return self.err(start, "expected a value");
        }
        Ok(Value::Atom { text, offset: start + lead })
    }

    fn tasks(&mut self) -> PResult<Vec<TaskSpec>> {
        self.expect('{')?;
        let mut out = Vec::new();
        loop {
            self.skip(true);
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(out);
                }
                None => return self.err(self.pos, "unterminated tasks block"),
                _ => out.push(self.task()?),
            }
        }
    }

    fn task(&mut self) -> PResult<TaskSpec> {
        let offset = self.pos;
        let name = self.ident()?;
        let mut target = None;
        let mut options = BTreeMap::new();
        loop {
            self.skip(false);
            match self.peek() {
                None | Some('\n') | Some('}') => break,
                _ => {}
            }
            let at = self.pos;
            let word = self.ident()?;
            if self.peek() == Some('=') {
                self.bump();
                let v = if self.peek() == Some('"') {
                    self.bump();
                    let s = self.pos;
                    while self.peek().is_some_and(|c| c != '"' && c != '\n') {
                        self.bump();
                    }
                    if self.peek() != Some('"') {
                        return self.err(s - 1, "unterminated string");
                    }
                    let v = self.src[s..self.pos].to_string();
                    self.bump();
                    v
                } else {
                    let s = self.pos;
                    while self.peek().is_some_and(|c| !c.is_whitespace() && c != '}' && c != '#') {
                        self.bump();
                    }
                    self.src[s..self.pos].to_string()
                };
                if options.insert(word.clone(), v).is_some() {
                    return self.err(at, format!("option '{word}' given twice"));
                }
            } else if target.is_none() {
                target = Some(word);
            } else {
                return self.err(at, format!("unexpected argument '{word}'"));
            }
        }
        Ok(TaskSpec { name, target, options, offset })
    }
}

pub fn parse_problem(src: &str) -> Result<ProblemFile, Located> {
    let mut p = Parser { src, pos: 0, map: SourceMap::new(src) };
    p.file()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_blocks_and_tasks() {
        let src = "ring { vars = 2 }\n# comment\nlie_rinehart L {\n  anchor = [[1, 0],\n            [x, y]]\n  brackets = { (1,2) -> [1, 0] }\n}\ndlie T { from = (L, f) }\ntasks {\n  check-axioms T samples=5\n  nf T kind=utensor expr=\"u2 ⊗ (x)*u1\"\n}\n";
        let p = parse_problem(src).unwrap();
        assert_eq!(p.nvars, 2);
        assert_eq!(p.blocks.len(), 2);
        let anchor = &p.blocks[0].field("anchor").unwrap().value;
        let Value::List { items, .. } = anchor else { panic!() };
        assert_eq!(items.len(), 2);
        let Value::Atom { text, .. } = &p.blocks[1].field("from").unwrap().value else { panic!() };
        assert_eq!(text, "(L, f)");
        assert_eq!(p.tasks.len(), 2);
        assert_eq!(p.tasks[1].options["expr"], "u2 ⊗ (x)*u1");
        assert_eq!(p.tasks[0].target.as_deref(), Some("T"));
    }

    #[test]
    fn reports_positions() {
        let err = parse_problem("ring { vars = 2 }\nwidget W { }\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        let err = parse_problem("ring { vars = 2 }\ncochain f { values = { (1,2) x } }").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_problem("cochain f { }").is_err());
    }
}
