//! Line-oriented text format for an operation plus an instance.
//!
//! ```text
//! gmmcsp 1
//! domain 2
//! op 3
//! table
//! 0 1
//! 1 0
//! 1 0
//! 0 1
//! vars 3
//! constraints 1
//! scope 2 1 3
//! tuples 2
//! 0 0
//! 1 1
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Blank lines are
//! ignored. Table values may be spread over any number of lines; each tuple
//! sits on its own line.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{AlgebraError, OperationTable, Value};
use crate::instance::{Constraint, Instance, InstanceError};
use crate::relations::{Relation, Tuple};

pub const FORMAT_VERSION: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {error}")]
    Semantic { line: usize, error: SemanticError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("scope index {index} out of range for {num_vars} variables")]
    ScopeOutOfRange { index: usize, num_vars: usize },
    #[error("scope declares {declared} indices but lists {actual}")]
    ScopeLength { declared: usize, actual: usize },
    #[error("tuple has {actual} values, scope has {expected}")]
    TupleArity { expected: usize, actual: usize },
    #[error("value {value} outside domain of size {domain_size}")]
    ValueOutOfRange { value: usize, domain_size: usize },
}

#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub op: OperationTable,
    pub instance: Instance,
    /// Non-fatal findings such as duplicate tuples.
    pub warnings: Vec<String>,
}

struct Line<'a> {
    number: usize,
    words: Vec<&'a str>,
}

struct Reader<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn semantic(line: usize, error: impl Into<SemanticError>) -> FormatError {
    FormatError::Semantic {
        line,
        error: error.into(),
    }
}

fn number(line: usize, word: &str) -> Result<usize, FormatError> {
    word.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, found {word:?}")))
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<Line> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                let words: Vec<&str> = body.split_whitespace().collect();
                (!words.is_empty()).then_some(Line { number: i + 1, words })
            })
            .collect();
        let last_line = text.lines().count() + 1;
        Reader {
            lines,
            pos: 0,
            last_line,
        }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next_line(&mut self, what: &str) -> Result<&Line<'a>, FormatError> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| parse_err(self.last_line, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(line)
    }

    /// Reads `keyword n_1 .. n_count` and returns the numbers.
    fn directive(&mut self, keyword: &str, count: usize) -> Result<(usize, Vec<usize>), FormatError> {
        let line = self.next_line(&format!("`{keyword}`"))?;
        let number_ = line.number;
        if line.words[0] != keyword {
            return Err(parse_err(
                number_,
                format!("expected `{keyword}`, found {:?}", line.words[0]),
            ));
        }
        if line.words.len() != count + 1 {
            return Err(parse_err(
                number_,
                format!("`{keyword}` takes {count} argument(s), found {}", line.words.len() - 1),
            ));
        }
        let args = line.words[1..]
            .iter()
            .map(|w| number(number_, w))
            .collect::<Result<_, _>>()?;
        Ok((number_, args))
    }

    fn single(&mut self, keyword: &str) -> Result<(usize, usize), FormatError> {
        let (line, args) = self.directive(keyword, 1)?;
        Ok((line, args[0]))
    }
}

fn read_operation(reader: &mut Reader) -> Result<OperationTable, FormatError> {
    let (line, version) = reader.single("gmmcsp")?;
    if version != FORMAT_VERSION {
        return Err(parse_err(line, format!("unsupported format version {version}")));
    }
    let (_, q) = reader.single("domain")?;
    let (op_line, k) = reader.single("op")?;
    let line = reader.next_line("`table`")?;
    let table_line = line.number;
    if line.words[0] != "table" {
        return Err(parse_err(table_line, format!("expected `table`, found {:?}", line.words[0])));
    }
    let mut values = line.words[1..]
        .iter()
        .map(|w| number(table_line, w))
        .collect::<Result<Vec<_>, _>>()?;
    while let Some(line) = reader.peek() {
        if line.words[0].parse::<usize>().is_err() {
            break;
        }
        for w in &line.words {
            values.push(number(line.number, w)?);
        }
        reader.pos += 1;
    }
    OperationTable::new(q, k, values).map_err(|e| {
        let line = match e {
            AlgebraError::ArityTooSmall(_) => op_line,
            _ => table_line,
        };
        semantic(line, e)
    })
}

/// Parses only the header and the operation block, ignoring the rest.
pub fn parse_operation(text: &str) -> Result<OperationTable, FormatError> {
    read_operation(&mut Reader::new(text))
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance, FormatError> {
    let mut reader = Reader::new(text);
    let op = read_operation(&mut reader)?;
    let q = op.domain_size();
    let (vars_line, n) = reader.single("vars")?;
    let (_, m) = reader.single("constraints")?;
    let mut warnings = Vec::new();
    let mut constraints = Vec::with_capacity(m);
    for l in 1..=m {
        let line = reader.next_line("`scope`")?;
        let scope_line = line.number;
        if line.words[0] != "scope" {
            return Err(parse_err(scope_line, format!("expected `scope`, found {:?}", line.words[0])));
        }
        let Some(declared) = line.words.get(1) else {
            return Err(parse_err(scope_line, "`scope` needs a length"));
        };
        let declared = number(scope_line, declared)?;
        let scope = line.words[2..]
            .iter()
            .map(|w| number(scope_line, w))
            .collect::<Result<Vec<_>, _>>()?;
        if scope.len() != declared {
            return Err(semantic(
                scope_line,
                SemanticError::ScopeLength {
                    declared,
                    actual: scope.len(),
                },
            ));
        }
        if let Some(&index) = scope.iter().find(|&&i| i == 0 || i > n) {
            return Err(semantic(scope_line, SemanticError::ScopeOutOfRange { index, num_vars: n }));
        }
        let (_, count) = reader.single("tuples")?;
        let mut relation = Relation::empty(scope.len());
        for _ in 0..count {
            let line = reader.next_line("a tuple")?;
            let at = line.number;
            let values = line
                .words
                .iter()
                .map(|w| number(at, w))
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != scope.len() {
                return Err(semantic(
                    at,
                    SemanticError::TupleArity {
                        expected: scope.len(),
                        actual: values.len(),
                    },
                ));
            }
            if let Some(&value) = values.iter().find(|&&v| v >= q) {
                return Err(semantic(at, SemanticError::ValueOutOfRange { value, domain_size: q }));
            }
            let t = Tuple::new(values.into_iter().map(|v| v as Value).collect());
            if !relation.insert(t).expect("arity checked") {
                warnings.push(format!("line {at}: duplicate tuple in constraint {l} ignored"));
            }
        }
        constraints.push(Constraint::new(scope, relation));
    }
    if let Some(line) = reader.peek() {
        return Err(parse_err(line.number, format!("unexpected {:?} after the last constraint", line.words[0])));
    }
    let instance = Instance::new(n, q, constraints).map_err(|e| semantic(vars_line, e))?;
    Ok(ParsedInstance {
        op,
        instance,
        warnings,
    })
}

fn write_operation(out: &mut String, op: &OperationTable) {
    let q = op.domain_size();
    writeln!(out, "gmmcsp {FORMAT_VERSION}").unwrap();
    writeln!(out, "domain {q}").unwrap();
    writeln!(out, "op {}", op.arity()).unwrap();
    out.push_str("table\n");
    for row in op.values().chunks(q) {
        write_values(out, row);
    }
}

fn write_values(out: &mut String, values: &[Value]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

/// Canonical text of an operation alone.
pub fn serialize_operation(op: &OperationTable) -> String {
    let mut out = String::new();
    write_operation(&mut out, op);
    out
}

/// Canonical text: table rows of `q` values, tuples in sorted order, no
/// comments or blank lines.
pub fn serialize_instance(op: &OperationTable, instance: &Instance) -> String {
    let mut out = String::new();
    write_operation(&mut out, op);
    writeln!(out, "vars {}", instance.num_vars()).unwrap();
    writeln!(out, "constraints {}", instance.constraints().len()).unwrap();
    for c in instance.constraints() {
        write!(out, "scope {}", c.scope.len()).unwrap();
        for i in &c.scope {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
        writeln!(out, "tuples {}", c.relation.len()).unwrap();
        for t in &c.relation {
            write_values(&mut out, t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin::{mixed3, xor3};

    const TRIANGLE: &str = "\
gmmcsp 1
domain 2
op 3
table
0 1
1 0
1 0
0 1
vars 3
constraints 3
scope 2 1 2
tuples 2
0 0
1 1
scope 2 2 3
tuples 2
0 1
1 0
scope 2 1 3
tuples 2
0 0
1 1
";

    fn xor_eq(c: Value) -> Relation {
        Relation::from_tuples(2, [[0, c], [1, 1 ^ c]]).unwrap()
    }

    #[test]
    fn triangle_matches_hand_built_instance() {
        let parsed = parse_instance(TRIANGLE).unwrap();
        assert_eq!(parsed.op, xor3());
        let want = Instance::new(
            3,
            2,
            vec![
                Constraint::new(vec![1, 2], xor_eq(0)),
                Constraint::new(vec![2, 3], xor_eq(1)),
                Constraint::new(vec![1, 3], xor_eq(0)),
            ],
        )
        .unwrap();
        assert_eq!(parsed.instance, want);
        assert!(parsed.warnings.is_empty());
        assert_eq!(serialize_instance(&parsed.op, &parsed.instance), TRIANGLE);
    }

    #[test]
    fn comments_layout_and_duplicates() {
        let text = "# header\ngmmcsp 1\n\ndomain 2 # binary\nop 3\ntable 0 1 1 0\n1 0 0 1\nvars 2\nconstraints 1\nscope 2 2 2\ntuples 3\n1 1\n0 0\n1 1\n";
        let parsed = parse_instance(text).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].starts_with("line 14"));
        let canonical = serialize_instance(&parsed.op, &parsed.instance);
        let again = parse_instance(&canonical).unwrap();
        assert_eq!(again.instance, parsed.instance);
        assert_eq!(serialize_instance(&again.op, &again.instance), canonical);
    }

    #[test]
    fn empty_constraint_section() {
        let text = "gmmcsp 1\ndomain 2\nop 3\ntable\n0 1\n1 0\n1 0\n0 1\nvars 4\nconstraints 0\n";
        let parsed = parse_instance(text).unwrap();
        assert_eq!(parsed.instance.num_vars(), 4);
        assert!(parsed.instance.constraints().is_empty());
    }

    #[test]
    fn short_table_is_a_semantic_error() {
        let text = "gmmcsp 1\ndomain 2\nop 3\ntable\n0 0 0 1 0 1 1\nvars 1\nconstraints 0\n";
        assert_eq!(
            parse_instance(text).unwrap_err(),
            FormatError::Semantic {
                line: 4,
                error: SemanticError::Algebra(AlgebraError::WrongTableLength {
                    expected: 8,
                    actual: 7
                })
            }
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let base = "gmmcsp 1\ndomain 2\nop 3\ntable\n0 1\n1 0\n1 0\n0 1\nvars 2\nconstraints 1\n";
        let cases = [
            ("scope 2 1 3\ntuples 0\n", 11),
            ("scope 2 1\ntuples 0\n", 11),
            ("scope 2 1 2\ntuples 1\n0 1 1\n", 13),
            ("scope 2 1 2\ntuples 1\n0 2\n", 13),
            ("scope 2 1 2\ntuples 1\n0 x\n", 13),
            ("scope 2 1 2\ntuples 2\n0 1\n", 14),
            ("scope 2 1 2\ntuples 0\nextra\n", 13),
            ("tuples 0\n", 11),
        ];
        for (tail, line) in cases {
            let err = parse_instance(&format!("{base}{tail}")).unwrap_err();
            let got = match err {
                FormatError::Parse { line, .. } | FormatError::Semantic { line, .. } => line,
            };
            assert_eq!(got, line, "{tail:?}: {err}");
        }
        assert!(matches!(
            parse_instance("gmmcsp 2\n").unwrap_err(),
            FormatError::Parse { line: 1, .. }
        ));
        assert!(matches!(
            parse_instance("").unwrap_err(),
            FormatError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn operation_only() {
        let text = serialize_operation(&mixed3());
        assert_eq!(parse_operation(&text).unwrap(), mixed3());
        assert_eq!(text.lines().count(), 4 + 9);
        assert_eq!(parse_operation(TRIANGLE).unwrap(), xor3());
    }
}
