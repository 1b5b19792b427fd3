//! Text formats for graphs, conditions, rules, programs, MSO formulas and
//! proof scripts, and the workspace files that bundle them.
//!
//! Every printer emits text its parser reads back to a structurally equal
//! value. Conditions are printed after their morphisms are turned into
//! inclusions, so only conditions that already use inclusions (everything
//! the parser produces) round-trip literally.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::condition::{Condition, Constraint, Rooted, SetSort};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Graph, Id, Label};
use crate::hoare::{Axiom, ProofTree, Step};
use crate::interpreter::Program;
use crate::morphism::Morphism;
use crate::mso::{Formula, Sort, VTerm};
use crate::rewrite::Rule;
use crate::wlp::{applicability, precondition, wlp};

/// Everything declared in a workspace file and the files it imports.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub alphabet: Alphabet,
    pub graphs: BTreeMap<String, Arc<Graph>>,
    pub conditions: BTreeMap<String, Rooted>,
    pub rules: BTreeMap<String, Arc<Rule>>,
    pub programs: BTreeMap<String, Arc<Program>>,
    pub proofs: BTreeMap<String, ProofTree>,
    pub axioms: Vec<Axiom>,
    pub formulas: BTreeMap<String, Formula>,
    /// Node bound for implication checks, if set by the file.
    pub bound: Option<usize>,
    /// Step budget for program runs, if set by the file.
    pub budget: Option<usize>,
    // files already read; importing one again is a no-op
    imported: BTreeSet<PathBuf>,
}

const DECLARATIONS: &[&str] = &["alphabet", "graph", "condition", "rule", "program", "proof", "axiom", "mso", "bound", "budget", "import"];

impl Workspace {
    pub fn load(path: impl AsRef<Path>) -> Result<Workspace> {
        let mut ws = Workspace::default();
        ws.import(path.as_ref(), &mut Vec::new())?;
        Ok(ws)
    }

    /// Parses workspace text; imports are resolved against `base`.
    pub fn parse(src: &str, base: Option<&Path>) -> Result<Workspace> {
        let mut ws = Workspace::default();
        ws.extend(src, base, &mut Vec::new())?;
        Ok(ws)
    }

    /// Adds the declarations in `src` to this workspace.
    pub fn add(&mut self, src: &str, base: Option<&Path>) -> Result<()> {
        self.extend(src, base, &mut Vec::new())
    }

    fn import(&mut self, path: &Path, stack: &mut Vec<PathBuf>) -> Result<()> {
        let canon = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
        if self.imported.contains(&canon) {
            return Ok(());
        }
        if stack.contains(&canon) {
            return Err(Error::Undefined {
                kind: "import (cyclic)",
                name: path.display().to_string(),
            });
        }
        let src = std::fs::read_to_string(path).map_err(|e| Error::Undefined {
            kind: "file",
            name: format!("{} ({e})", path.display()),
        })?;
        stack.push(canon);
        let r = self.extend(&src, path.parent(), stack);
        let canon = stack.pop().expect("pushed above");
        self.imported.insert(canon);
        r.map_err(|e| match e {
            Error::Parse { line, column, message } => Error::Parse {
                line,
                column,
                message: format!("{}: {message}", path.display()),
            },
            e => e,
        })
    }

    fn extend(&mut self, src: &str, base: Option<&Path>, stack: &mut Vec<PathBuf>) -> Result<()> {
        let toks = lex(src)?;
        let mut pos = 0;
        loop {
            let mut p = Parser { toks: &toks, pos, ws: self };
            if p.at_eof() {
                return Ok(());
            }
            let decl = p.declaration()?;
            pos = p.pos;
            match decl {
                Decl::Import(file, at) => {
                    let path = base.map(|b| b.join(&file)).unwrap_or_else(|| PathBuf::from(&file));
                    self.import(&path, stack).map_err(|e| match e {
                        Error::Parse { .. } => e,
                        e => at.error(e.to_string()),
                    })?
                }
                d => self.insert(d)?,
            }
        }
    }

    fn taken(&self, name: &str) -> bool {
        self.graphs.contains_key(name)
            || self.conditions.contains_key(name)
            || self.rules.contains_key(name)
            || self.programs.contains_key(name)
            || self.proofs.contains_key(name)
            || self.formulas.contains_key(name)
            || self.axioms.iter().any(|a| a.name.as_str() == name)
    }

    fn insert(&mut self, d: Decl) -> Result<()> {
        let (name, at) = match &d {
            Decl::Graph(n, at, _) | Decl::Condition(n, at, _) | Decl::Rule(n, at, _) | Decl::Program(n, at, _) | Decl::Proof(n, at, _) | Decl::Axiom(n, at, _) | Decl::Mso(n, at, _) => (n.clone(), *at),
            Decl::Alphabet(at, a) => {
                if *a != self.alphabet && self.has_items() {
                    return Err(at.error("the alphabet must be declared before anything that uses it".into()));
                }
                self.alphabet = a.clone();
                return Ok(());
            }
            Decl::Bound(n) => {
                self.bound = Some(*n);
                return Ok(());
            }
            Decl::Budget(n) => {
                self.budget = Some(*n);
                return Ok(());
            }
            Decl::Import(..) => unreachable!("imports are handled by the caller"),
        };
        if self.taken(&name) {
            return Err(at.error(format!("`{name}` is declared twice")));
        }
        match d {
            Decl::Graph(n, _, g) => {
                self.graphs.insert(n, g);
            }
            Decl::Condition(n, _, c) => {
                self.conditions.insert(n, c);
            }
            Decl::Rule(n, _, r) => {
                self.rules.insert(n, r);
            }
            Decl::Program(n, _, p) => {
                self.programs.insert(n, p);
            }
            Decl::Proof(n, _, t) => {
                self.proofs.insert(n, t);
            }
            Decl::Axiom(_, _, a) => self.axioms.push(a),
            Decl::Mso(n, _, f) => {
                self.formulas.insert(n, f);
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn has_items(&self) -> bool {
        !(self.graphs.is_empty() && self.conditions.is_empty() && self.rules.is_empty() && self.formulas.is_empty())
    }

    pub fn graph(&self, name: &str) -> Result<&Arc<Graph>> {
        self.graphs.get(name).ok_or_else(|| undefined("graph", name))
    }

    pub fn condition(&self, name: &str) -> Result<&Rooted> {
        self.conditions.get(name).ok_or_else(|| undefined("condition", name))
    }

    pub fn rule(&self, name: &str) -> Result<&Arc<Rule>> {
        self.rules.get(name).ok_or_else(|| undefined("rule", name))
    }

    /// A declared program, or a rule called as a program.
    pub fn program(&self, name: &str) -> Result<Arc<Program>> {
        if let Some(p) = self.programs.get(name) {
            return Ok(p.clone());
        }
        self.rules.get(name).map(|r| Program::call(r.clone())).ok_or_else(|| undefined("program", name))
    }

    pub fn proof(&self, name: &str) -> Result<&ProofTree> {
        self.proofs.get(name).ok_or_else(|| undefined("proof", name))
    }

    pub fn formula(&self, name: &str) -> Result<&Formula> {
        self.formulas.get(name).ok_or_else(|| undefined("formula", name))
    }

    /// Parses a condition over `context` using this workspace's names.
    pub fn parse_condition(&self, src: &str, context: &Arc<Graph>) -> Result<Condition> {
        self.parse_with(src, |p| p.closed_condition(context))
    }

    pub fn parse_program(&self, src: &str) -> Result<Arc<Program>> {
        self.parse_with(src, |p| p.program())
    }

    pub fn parse_proof(&self, src: &str) -> Result<ProofTree> {
        self.parse_with(src, |p| p.proof())
    }

    pub fn parse_graph(&self, src: &str) -> Result<Arc<Graph>> {
        self.parse_with(src, |p| p.graph_body())
    }

    pub fn parse_formula(&self, src: &str) -> Result<Formula> {
        self.parse_with(src, |p| p.formula_sentence())
    }

    fn parse_with<T>(&self, src: &str, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
        let toks = lex(src)?;
        let mut p = Parser { toks: &toks, pos: 0, ws: self };
        let x = f(&mut p)?;
        p.eat_sym(";");
        if !p.at_eof() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(x)
    }
}

fn undefined(kind: &'static str, name: &str) -> Error {
    Error::Undefined { kind, name: name.to_string() }
}

pub fn parse_graph(src: &str) -> Result<Arc<Graph>> {
    Workspace::default().parse_graph(src)
}

/// Parses a closed condition over `context` in the blank alphabet.
pub fn parse_condition(src: &str, context: &Arc<Graph>) -> Result<Condition> {
    Workspace::default().parse_condition(src, context)
}

pub fn parse_constraint(src: &str) -> Result<Condition> {
    parse_condition(src, &Arc::new(Graph::empty()))
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    Workspace::default().parse_formula(src)
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message,
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    at: Pos,
}

const SYMBOLS: &[&str] = &["<=>", "=>", "->", "{", "}", "(", ")", "[", "]", ",", ";", ":", ".", "|", "=", "!"];

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '□'
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let at = Pos { line, column: col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(at.error("unterminated string".into())),
                    Some('"') => break,
                    Some('\\') if i + 1 < chars.len() => {
                        s.push(chars[i + 1]);
                        advance(&mut i, &mut line, &mut col, 2);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            advance(&mut i, &mut line, &mut col, 1);
            out.push(Token { tok: Tok::Str(s), at });
        } else if ident_char(c) {
            let start = i;
            while i < chars.len() && ident_char(chars[i]) {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                at,
            });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| s.chars().enumerate().all(|(k, sc)| chars.get(i + k) == Some(&sc))) {
            advance(&mut i, &mut line, &mut col, sym.chars().count());
            out.push(Token { tok: Tok::Sym(sym), at });
        } else {
            return Err(at.error(format!("unexpected character `{c}`")));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        at: Pos { line, column: col },
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

enum Decl {
    Alphabet(Pos, Alphabet),
    Graph(String, Pos, Arc<Graph>),
    Condition(String, Pos, Rooted),
    Rule(String, Pos, Arc<Rule>),
    Program(String, Pos, Arc<Program>),
    Proof(String, Pos, ProofTree),
    Axiom(String, Pos, Axiom),
    Mso(String, Pos, Formula),
    Bound(usize),
    Budget(usize),
    Import(String, Pos),
}

const RESERVED: &[&str] = &["true", "false", "not", "and", "or", "exists", "forall", "exV", "exE", "allV", "allE", "in", "path", "skip", "if", "then", "else", "try"];

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    ws: &'a Workspace,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn at(&self) -> Pos {
        self.toks[self.pos].at
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        };
        self.at().error(format!("{msg}, found {found}"))
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{k}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn string(&mut self) -> Result<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected a string")),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let at = self.at();
        let s = self.ident("a number")?;
        s.parse().map_err(|_| at.error(format!("`{s}` is not a number")))
    }

    fn label(&mut self) -> Result<Label> {
        let s = self.ident("a label")?;
        Ok(if s == "blank" { Label::blank() } else { Label::from(s) })
    }

    // ----- declarations

    fn declaration(&mut self) -> Result<Decl> {
        let at = self.at();
        let Tok::Ident(kw) = self.peek().clone() else {
            return Err(self.error("expected a declaration"));
        };
        self.bump();
        let decl = match kw.as_str() {
            "alphabet" => {
                self.expect_sym("{")?;
                let (mut nodes, mut edges) = (vec![Label::blank()], vec![Label::blank()]);
                while !self.eat_sym("}") {
                    let which = self.ident("`nodes` or `edges`")?;
                    self.expect_sym(":")?;
                    let mut ls = Vec::new();
                    if !self.is_sym(";") {
                        ls.push(self.label()?);
                        while self.eat_sym(",") {
                            ls.push(self.label()?);
                        }
                    }
                    self.expect_sym(";")?;
                    match which.as_str() {
                        "nodes" => nodes = ls,
                        "edges" => edges = ls,
                        _ => return Err(at.error(format!("unknown alphabet section `{which}`"))),
                    }
                }
                Decl::Alphabet(at, Alphabet::new(nodes, edges))
            }
            "graph" => {
                let name = self.ident("a graph name")?;
                Decl::Graph(name, at, self.graph_body()?)
            }
            "condition" => {
                let name = self.ident("a condition name")?;
                let context = if self.eat_kw("over") { self.graph_ref()? } else { Arc::new(Graph::empty()) };
                self.expect_sym("=")?;
                let c = self.closed_condition(&context)?;
                self.expect_sym(";")?;
                Decl::Condition(name, at, Rooted::new(context, c).map_err(|e| at.error(e.to_string()))?)
            }
            "rule" => {
                let name = self.ident("a rule name")?;
                Decl::Rule(name.clone(), at, Arc::new(self.rule_body(name)?))
            }
            "program" => {
                let name = self.ident("a program name")?;
                if self.ws.rules.contains_key(&name) {
                    return Err(at.error(format!("`{name}` is already a rule")));
                }
                self.expect_sym("=")?;
                let p = self.program()?;
                self.eat_sym(";");
                Decl::Program(name, at, p)
            }
            "proof" => {
                let name = self.ident("a proof name")?;
                self.expect_sym("=")?;
                let t = self.proof()?;
                self.eat_sym(";");
                Decl::Proof(name, at, t)
            }
            "axiom" => {
                let name = self.ident("an axiom name")?;
                self.expect_sym("=")?;
                let antecedent = self.cexpr()?;
                self.expect_sym("=>")?;
                let consequent = self.cexpr()?;
                self.expect_sym(";")?;
                Decl::Axiom(name.clone(), at, Axiom { name, antecedent, consequent })
            }
            "mso" => {
                let name = self.ident("a formula name")?;
                self.expect_sym("=")?;
                let f = self.formula_sentence()?;
                self.expect_sym(";")?;
                Decl::Mso(name, at, f)
            }
            "bound" | "budget" => {
                let n = self.number()?;
                self.expect_sym(";")?;
                if kw == "bound" {
                    Decl::Bound(n)
                } else {
                    Decl::Budget(n)
                }
            }
            "import" => {
                let file = self.string()?;
                self.expect_sym(";")?;
                Decl::Import(file, at)
            }
            _ => return Err(at.error(format!("expected a declaration, found `{kw}`"))),
        };
        Ok(decl)
    }

    // ----- graphs

    fn graph_body(&mut self) -> Result<Arc<Graph>> {
        let at = self.at();
        self.expect_sym("{")?;
        let mut nodes: Vec<(Id, Label)> = Vec::new();
        let mut edges: Vec<(Id, Id, Id, Label)> = Vec::new();
        let mut seen = BTreeSet::new();
        while !self.eat_sym("}") {
            let section = self.ident("`nodes` or `edges`")?;
            if !seen.insert(section.clone()) {
                return Err(at.error(format!("section `{section}` appears twice")));
            }
            self.expect_sym(":")?;
            match section.as_str() {
                "nodes" => {
                    if !self.is_sym(";") {
                        loop {
                            let id = self.ident("a node identifier")?;
                            let label = if self.eat_sym(":") { self.label()? } else { Label::blank() };
                            nodes.push((Id::from(id), label));
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                }
                "edges" => {
                    if !self.is_sym(";") {
                        loop {
                            let id = self.ident("an edge identifier")?;
                            self.expect_sym(":")?;
                            let s = self.ident("a source node")?;
                            self.expect_sym("->")?;
                            let t = self.ident("a target node")?;
                            let label = if self.eat_sym(":") { self.label()? } else { Label::blank() };
                            edges.push((Id::from(id), Id::from(s), Id::from(t), label));
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                }
                _ => return Err(at.error(format!("unknown graph section `{section}`"))),
            }
            self.expect_sym(";")?;
        }
        let g = Graph::from_parts(nodes, edges).map_err(|e| at.error(e.to_string()))?;
        self.ws.alphabet.admits(&g).map_err(|e| at.error(e.to_string()))?;
        Ok(Arc::new(g))
    }

    fn graph_ref(&mut self) -> Result<Arc<Graph>> {
        if self.is_sym("{") {
            return self.graph_body();
        }
        let at = self.at();
        let name = self.ident("a graph")?;
        self.ws.graphs.get(&name).cloned().ok_or_else(|| at.error(format!("undefined graph `{name}`")))
    }

    // ----- conditions

    fn closed_condition(&mut self, context: &Arc<Graph>) -> Result<Condition> {
        let at = self.at();
        let c = self.condition(context)?.uniquify_set_vars();
        c.check(context).map_err(|e| at.error(e.to_string()))?;
        if let Some(x) = c.free_set_vars().into_iter().next() {
            return Err(at.error(format!("set variable `{x}` is not bound")));
        }
        Ok(c)
    }

    fn condition(&mut self, ctx: &Arc<Graph>) -> Result<Condition> {
        let a = self.cond_implies(ctx)?;
        if self.eat_sym("<=>") {
            let b = self.cond_implies(ctx)?;
            return Ok(Condition::iff(a, b));
        }
        Ok(a)
    }

    fn cond_implies(&mut self, ctx: &Arc<Graph>) -> Result<Condition> {
        let a = self.cond_or(ctx)?;
        if self.eat_sym("=>") {
            let b = self.cond_implies(ctx)?;
            return Ok(Condition::implies(a, b));
        }
        Ok(a)
    }

    fn cond_or(&mut self, ctx: &Arc<Graph>) -> Result<Condition> {
        let mut xs = vec![self.cond_and(ctx)?];
        while self.eat_kw("or") {
            xs.push(self.cond_and(ctx)?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Condition::Or(xs) })
    }

    fn cond_and(&mut self, ctx: &Arc<Graph>) -> Result<Condition> {
        let mut xs = vec![self.cond_unary(ctx)?];
        while self.eat_kw("and") {
            xs.push(self.cond_unary(ctx)?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Condition::And(xs) })
    }

    fn cond_unary(&mut self, ctx: &Arc<Graph>) -> Result<Condition> {
        if self.eat_kw("not") {
            return Ok(Condition::not(self.cond_unary(ctx)?));
        }
        let at = self.at();
        if self.eat_sym("(") {
            let c = self.condition(ctx)?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        let Tok::Ident(word) = self.peek().clone() else {
            return Err(self.error("expected a condition"));
        };
        self.bump();
        match word.as_str() {
            "true" => Ok(Condition::True),
            "false" => Ok(Condition::falsity()),
            "exV" | "exE" | "allV" | "allE" => {
                let var = self.ident("a set variable")?;
                self.expect_sym("[")?;
                let body = self.condition(ctx)?;
                self.expect_sym("]")?;
                let sort = if word.ends_with('V') { SetSort::Nodes } else { SetSort::Edges };
                Ok(if word.starts_with("ex") {
                    Condition::exists_set(sort, var, body)
                } else {
                    Condition::forall_set(sort, var, body)
                })
            }
            "exists" | "forall" => {
                self.expect_sym("(")?;
                let gat = self.at();
                let cod = self.graph_ref()?;
                let m = Morphism::inclusion(ctx.clone(), cod.clone()).map_err(|e| gat.error(format!("graph does not extend its context {ctx}: {e}")))?;
                let gamma = if self.eat_sym("|") { self.constraint()? } else { Constraint::True };
                let body = if self.eat_sym(",") { self.condition(&cod)? } else { Condition::True };
                self.expect_sym(")")?;
                Ok(if word == "exists" {
                    Condition::exists(m, gamma, body)
                } else {
                    Condition::forall(m, gamma, body)
                })
            }
            name if !RESERVED.contains(&name) => {
                let r = self.ws.conditions.get(name).ok_or_else(|| at.error(format!("undefined condition `{name}`")))?;
                if r.context != *ctx {
                    return Err(at.error(format!("condition `{name}` is stated over {} but used over {ctx}", r.context)));
                }
                Ok(r.condition.clone())
            }
            _ => Err(at.error(format!("expected a condition, found `{word}`"))),
        }
    }

    fn constraint(&mut self) -> Result<Constraint> {
        let mut xs = vec![self.constraint_and()?];
        while self.eat_kw("or") {
            xs.push(self.constraint_and()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Constraint::Or(xs) })
    }

    fn constraint_and(&mut self) -> Result<Constraint> {
        let mut xs = vec![self.constraint_unary()?];
        while self.eat_kw("and") {
            xs.push(self.constraint_unary()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Constraint::And(xs) })
    }

    fn constraint_unary(&mut self) -> Result<Constraint> {
        if self.eat_kw("not") {
            return Ok(Constraint::not(self.constraint_unary()?));
        }
        if self.eat_sym("(") {
            let g = self.constraint()?;
            self.expect_sym(")")?;
            return Ok(g);
        }
        if self.eat_kw("true") {
            return Ok(Constraint::True);
        }
        if self.eat_kw("false") {
            return Ok(Constraint::falsity());
        }
        if self.eat_kw("path") {
            self.expect_sym("(")?;
            let from = self.ident("a node")?;
            self.expect_sym(",")?;
            let to = self.ident("a node")?;
            let mut avoid = Vec::new();
            if self.eat_sym(",") {
                self.expect_kw("not")?;
                loop {
                    avoid.push(Id::from(self.ident("an edge")?));
                    if !self.eat_sym("|") {
                        break;
                    }
                }
            }
            self.expect_sym(")")?;
            return Ok(Constraint::path(from, to, avoid));
        }
        let item = self.ident("a constraint")?;
        self.expect_kw("in")?;
        let set = self.ident("a set variable")?;
        Ok(Constraint::member(item, set))
    }

    // ----- rules

    fn rule_body(&mut self, name: String) -> Result<Rule> {
        let at = self.at();
        self.expect_sym("{")?;
        let (mut left, mut right, mut interface) = (None, None, None);
        let (mut ac_left, mut ac_right) = (Condition::True, Condition::True);
        while !self.eat_sym("}") {
            let fat = self.at();
            let field = self.ident("a rule field")?;
            match field.as_str() {
                "left" => left = Some(self.graph_ref()?),
                "right" => right = Some(self.graph_ref()?),
                "interface" => interface = Some(self.graph_ref()?),
                "acL" | "acR" => {
                    self.expect_sym(":")?;
                    let side = if field == "acL" { &left } else { &right };
                    let ctx = side.clone().ok_or_else(|| fat.error(format!("`{field}` must follow the graph it is stated over")))?;
                    let c = self.closed_condition(&ctx)?;
                    self.expect_sym(";")?;
                    if field == "acL" {
                        ac_left = c;
                    } else {
                        ac_right = c;
                    }
                }
                _ => return Err(fat.error(format!("unknown rule field `{field}`"))),
            }
        }
        let (Some(left), Some(right)) = (left, right) else {
            return Err(at.error(format!("rule `{name}` needs both a left and a right side")));
        };
        let r = match interface {
            Some(k) => Rule::new(name, left, k, right, ac_left, ac_right),
            None => Rule::from_sides(name, left, right, ac_left, ac_right),
        };
        r.map_err(|e| at.error(e.to_string()))
    }

    // ----- programs

    fn program(&mut self) -> Result<Arc<Program>> {
        if self.is_kw("if") || self.is_kw("try") {
            let is_if = self.is_kw("if");
            self.bump();
            let c = self.seq()?;
            self.expect_kw("then")?;
            let t = self.seq()?;
            self.expect_kw("else")?;
            let e = self.program()?;
            return Ok(Arc::new(if is_if { Program::If(c, t, e) } else { Program::Try(c, t, e) }));
        }
        self.seq()
    }

    // a `;` continues the sequence only when a program follows it
    fn seq(&mut self) -> Result<Arc<Program>> {
        let first = self.postfix()?;
        if self.is_sym(";") {
            let continues = match self.peek_at(1) {
                Tok::Ident(w) => !DECLARATIONS.contains(&w.as_str()) && !["then", "else"].contains(&w.as_str()),
                Tok::Sym(s) => *s == "{" || *s == "(",
                _ => false,
            };
            if continues {
                self.bump();
                let rest = if self.is_kw("if") || self.is_kw("try") { self.program()? } else { self.seq()? };
                return Ok(Program::seq(first, rest));
            }
        }
        Ok(first)
    }

    fn postfix(&mut self) -> Result<Arc<Program>> {
        let mut p = self.program_atom()?;
        while self.eat_sym("!") {
            p = Program::alap(p);
        }
        Ok(p)
    }

    fn program_atom(&mut self) -> Result<Arc<Program>> {
        let at = self.at();
        if self.eat_sym("(") {
            let p = self.program()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        if self.eat_sym("{") {
            let mut rules = Vec::new();
            if !self.is_sym("}") {
                loop {
                    let rat = self.at();
                    let name = self.ident("a rule")?;
                    let r = self.ws.rules.get(&name).ok_or_else(|| rat.error(format!("undefined rule `{name}`")))?;
                    rules.push(r.clone());
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
            return Ok(Arc::new(Program::Call(rules)));
        }
        if self.eat_kw("skip") {
            return Ok(Arc::new(Program::Skip));
        }
        let name = self.ident("a program")?;
        self.ws.program(&name).map_err(|_| at.error(format!("undefined rule or program `{name}`")))
    }

    // ----- proofs

    fn proof(&mut self) -> Result<ProofTree> {
        let at = self.at();
        self.expect_sym("(")?;
        let kind = self.ident("a proof rule")?;
        let pre = self.cexpr()?;
        let pat = self.at();
        let program = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                self.ws.parse_program(&s).map_err(|e| pat.error(format!("in program text: {e}")))?
            }
            _ => {
                let name = self.ident("a program")?;
                self.ws.program(&name).map_err(|e| pat.error(e.to_string()))?
            }
        };
        let post = self.cexpr()?;
        let mut children = Vec::new();
        while !self.eat_sym(")") {
            children.push(self.proof()?);
        }
        let arity = |n: usize| -> Result<()> {
            if children.len() == n {
                Ok(())
            } else {
                Err(at.error(format!("`{kind}` takes {n} premises, found {}", children.len())))
            }
        };
        let step = match kind.as_str() {
            "ruleapp" => {
                arity(0)?;
                Step::RuleApp
            }
            "ruleset" => Step::RuleSet(children),
            "comp" => {
                arity(2)?;
                let mut it = children.into_iter();
                Step::Comp(Box::new(it.next().unwrap()), Box::new(it.next().unwrap()))
            }
            "bang" | "cons" => {
                arity(1)?;
                let c = Box::new(children.pop().unwrap());
                if kind == "bang" {
                    Step::Bang(c)
                } else {
                    Step::Cons(c)
                }
            }
            _ => return Err(at.error(format!("unknown proof rule `{kind}`"))),
        };
        Ok(ProofTree::new(pre, program, post, step))
    }

    /// A constraint in proof scripts and axioms: a name, `true`, `false`, or
    /// an s-expression.
    fn cexpr(&mut self) -> Result<Condition> {
        let at = self.at();
        let empty = Arc::new(Graph::empty());
        if !self.eat_sym("(") {
            if self.eat_kw("true") {
                return Ok(Condition::True);
            }
            if self.eat_kw("false") {
                return Ok(Condition::falsity());
            }
            let name = self.ident("a condition")?;
            let r = self.ws.conditions.get(&name).ok_or_else(|| at.error(format!("undefined condition `{name}`")))?;
            if !r.context.is_empty() {
                return Err(at.error(format!("`{name}` is not a constraint")));
            }
            return Ok(r.condition.clone());
        }
        let op = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => return Err(self.error("expected an operator")),
        };
        self.bump();
        let alpha = &self.ws.alphabet;
        let in_rules = |e: Error| at.error(e.to_string());
        let c = match op.as_str() {
            "not" => Condition::not(self.cexpr()?),
            "and" | "or" => {
                let mut xs = Vec::new();
                while !self.is_sym(")") {
                    xs.push(self.cexpr()?);
                }
                if op == "and" {
                    Condition::And(xs)
                } else {
                    Condition::Or(xs)
                }
            }
            "implies" => Condition::implies(self.cexpr()?, self.cexpr()?),
            "iff" => Condition::iff(self.cexpr()?, self.cexpr()?),
            "pre" | "wlp" => {
                let r = self.rule_name()?;
                let c = self.cexpr()?;
                if op == "pre" {
                    precondition(&r, &c, alpha).map_err(in_rules)?
                } else {
                    wlp(&r, &c, alpha).map_err(in_rules)?
                }
            }
            "app" => {
                let mut rs = Vec::new();
                while !self.is_sym(")") {
                    rs.push(self.rule_name()?);
                }
                applicability(&rs, alpha).map_err(in_rules)?
            }
            "cond" => self.closed_condition(&empty)?,
            _ => return Err(at.error(format!("unknown operator `{op}`"))),
        };
        self.expect_sym(")")?;
        Ok(c)
    }

    fn rule_name(&mut self) -> Result<Arc<Rule>> {
        let at = self.at();
        let name = self.ident("a rule")?;
        self.ws.rules.get(&name).cloned().ok_or_else(|| at.error(format!("undefined rule `{name}`")))
    }

    // ----- MSO formulas

    fn formula_sentence(&mut self) -> Result<Formula> {
        self.formula(&mut Vec::new())
    }

    fn formula(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quantified(env);
        }
        let mut a = self.formula_implies(env)?;
        while self.eat_sym("<=>") {
            let b = self.formula_implies(env)?;
            a = Formula::Iff(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn quantified(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        let exists = self.is_kw("exists");
        self.bump();
        let var = self.ident("a variable")?;
        self.expect_sym(":")?;
        let sat = self.at();
        let s = self.ident("a sort")?;
        let sort = Sort::from_keyword(&s).ok_or_else(|| sat.error(format!("unknown sort `{s}`, expected V, E, VS or ES")))?;
        self.expect_sym(".")?;
        env.push((var.clone(), sort));
        let body = self.formula(env);
        env.pop();
        let body = body?;
        Ok(if exists { Formula::exists(var, sort, body) } else { Formula::forall(var, sort, body) })
    }

    // operands of binary connectives may be quantifiers whose body extends to the right
    fn formula_operand(&mut self, env: &mut Vec<(String, Sort)>, next: fn(&mut Self, &mut Vec<(String, Sort)>) -> Result<Formula>) -> Result<Formula> {
        if self.is_kw("exists") || self.is_kw("forall") {
            self.quantified(env)
        } else {
            next(self, env)
        }
    }

    fn formula_implies(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        let a = self.formula_or(env)?;
        if self.eat_sym("=>") {
            let b = self.formula_operand(env, Self::formula_implies)?;
            return Ok(Formula::implies(a, b));
        }
        Ok(a)
    }

    fn formula_or(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        let mut a = self.formula_and(env)?;
        while self.eat_kw("or") {
            let b = self.formula_operand(env, Self::formula_and)?;
            a = Formula::or(a, b);
        }
        Ok(a)
    }

    fn formula_and(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        let mut a = self.formula_unary(env)?;
        while self.eat_kw("and") {
            let b = self.formula_operand(env, Self::formula_unary)?;
            a = Formula::and(a, b);
        }
        Ok(a)
    }

    fn formula_unary(&mut self, env: &mut Vec<(String, Sort)>) -> Result<Formula> {
        if self.eat_kw("not") {
            let a = self.formula_operand(env, Self::formula_unary)?;
            return Ok(Formula::not(a));
        }
        if self.eat_sym("(") {
            let a = self.formula(env)?;
            self.expect_sym(")")?;
            return Ok(a);
        }
        if self.eat_kw("true") {
            return Ok(Formula::True);
        }
        if self.eat_kw("false") {
            return Ok(Formula::False);
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quantified(env);
        }
        let at = self.at();
        if let Tok::Ident(w) = self.peek().clone() {
            if let Some(l) = w.strip_prefix("lab_") {
                if matches!(self.peek_at(1), Tok::Sym("(")) {
                    self.bump();
                    self.bump();
                    let label = if l == "blank" { Label::blank() } else { Label::from(l) };
                    let f = match self.term(env)? {
                        (Term::Vertex(t), _) => Formula::VertexLabel(t, label),
                        (Term::Edge(e), _) => Formula::EdgeLabel(e, label),
                    };
                    self.expect_sym(")")?;
                    return Ok(f);
                }
            }
        }
        let (lhs, lat) = self.term(env)?;
        if self.eat_sym("=") {
            let (rhs, rat) = self.term(env)?;
            return match (lhs, rhs) {
                (Term::Vertex(a), Term::Vertex(b)) => Ok(Formula::VertexEq(a, b)),
                (Term::Edge(a), Term::Edge(b)) => Ok(Formula::EdgeEq(a, b)),
                _ => Err(rat.error("both sides of `=` must have the same sort".into())),
            };
        }
        if self.eat_kw("in") {
            let sat = self.at();
            let set = self.ident("a set variable")?;
            let sort = lookup(env, &set).ok_or_else(|| sat.error(format!("unbound variable `{set}`")))?;
            return match (lhs, sort) {
                (Term::Vertex(t), Sort::VertexSet) => Ok(Formula::VertexIn(t, Id::from(set))),
                (Term::Edge(e), Sort::EdgeSet) => Ok(Formula::EdgeIn(e, Id::from(set))),
                _ => Err(sat.error(format!("`{set}` is not a set of the right sort"))),
            };
        }
        let _ = (lat, at);
        Err(self.error("expected `=` or `in`"))
    }

    fn term(&mut self, env: &[(String, Sort)]) -> Result<(Term, Pos)> {
        let at = self.at();
        let name = self.ident("a term")?;
        if (name == "s" || name == "t") && self.eat_sym("(") {
            let eat = self.at();
            let e = self.ident("an edge variable")?;
            if lookup(env, &e) != Some(Sort::Edge) {
                return Err(eat.error(format!("`{e}` is not a bound edge variable")));
            }
            self.expect_sym(")")?;
            let e = Id::from(e);
            let t = if name == "s" { VTerm::Source(e) } else { VTerm::Target(e) };
            return Ok((Term::Vertex(t), at));
        }
        match lookup(env, &name) {
            Some(Sort::Vertex) => Ok((Term::Vertex(VTerm::Var(Id::from(name))), at)),
            Some(Sort::Edge) => Ok((Term::Edge(Id::from(name)), at)),
            Some(_) => Err(at.error(format!("set variable `{name}` used as a term"))),
            None => Err(at.error(format!("unbound variable `{name}`"))),
        }
    }
}

enum Term {
    Vertex(VTerm),
    Edge(Id),
}

fn lookup(env: &[(String, Sort)], x: &str) -> Option<Sort> {
    env.iter().rev().find(|(y, _)| y == x).map(|(_, s)| *s)
}

// ---------------------------------------------------------------------------
// printers

pub fn print_graph(name: &str, g: &Graph) -> String {
    format!("graph {name} {g}")
}

fn print_label(l: &Label) -> String {
    if l.is_blank() {
        "blank".into()
    } else {
        l.to_string()
    }
}

pub fn print_alphabet(a: &Alphabet) -> String {
    let join = |ls: &[Label]| ls.iter().map(print_label).collect::<Vec<_>>().join(", ");
    format!("alphabet {{ nodes: {}; edges: {}; }}", join(&a.node_labels), join(&a.edge_labels))
}

pub fn print_constraint(g: &Constraint) -> String {
    fn go(g: &Constraint, out: &mut String, min: u8) {
        let prec = match g {
            Constraint::Or(xs) if xs.len() > 1 => 0,
            Constraint::And(xs) if xs.len() > 1 => 1,
            _ => 2,
        };
        let paren = prec < min;
        if paren {
            out.push('(');
        }
        match g {
            Constraint::True => out.push_str("true"),
            Constraint::Not(x) if **x == Constraint::True => out.push_str("false"),
            Constraint::Member { item, set } => write!(out, "{item} in {set}").unwrap(),
            Constraint::Path { from, to, avoid } => {
                write!(out, "path({from}, {to}").unwrap();
                if !avoid.is_empty() {
                    write!(out, ", not {}", avoid.iter().map(|e| e.as_str()).collect::<Vec<_>>().join("|")).unwrap();
                }
                out.push(')');
            }
            Constraint::Not(x) => {
                out.push_str("not ");
                go(x, out, 2);
            }
            Constraint::And(xs) | Constraint::Or(xs) if xs.len() > 1 => {
                let (op, inner) = if matches!(g, Constraint::And(_)) { (" and ", 2) } else { (" or ", 1) };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(op);
                    }
                    go(x, out, inner);
                }
            }
            // empty and singleton lists have no literal syntax
            Constraint::And(xs) => go(&xs.first().cloned().unwrap_or(Constraint::True), out, min),
            Constraint::Or(xs) => go(&xs.first().cloned().unwrap_or_else(Constraint::falsity), out, min),
        }
        if paren {
            out.push(')');
        }
    }
    let mut out = String::new();
    go(g, &mut out, 0);
    out
}

/// The condition in text form; its morphisms are first turned into inclusions.
pub fn print_condition(c: &Condition) -> Result<String> {
    let c = if c.inclusions_only() { c.clone() } else { c.with_inclusions()? };
    let mut out = String::new();
    cond_text(&c, &mut out, 0);
    Ok(out)
}

fn cond_text(c: &Condition, out: &mut String, min: u8) {
    let prec = match c {
        Condition::Or(xs) if xs.len() > 1 => 0,
        Condition::And(xs) if xs.len() > 1 => 1,
        _ => 2,
    };
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    let quantifier = |out: &mut String, word: &str, e: &crate::condition::Exists, body: &Condition| {
        write!(out, "{word} ({}", e.morphism.codomain()).unwrap();
        if e.constraint != Constraint::True {
            write!(out, " | {}", print_constraint(&e.constraint)).unwrap();
        }
        if *body != Condition::True {
            out.push_str(", ");
            cond_text(body, out, 0);
        }
        out.push(')');
    };
    let set_quantifier = |out: &mut String, word: &str, sort: &SetSort, var: &Id, body: &Condition| {
        write!(out, "{word}{} {var} [", if *sort == SetSort::Nodes { "V" } else { "E" }).unwrap();
        cond_text(body, out, 0);
        out.push(']');
    };
    match c {
        Condition::True => out.push_str("true"),
        Condition::Not(x) => match &**x {
            Condition::True => out.push_str("false"),
            Condition::Exists(e) if matches!(e.body, Condition::Not(_)) => {
                let Condition::Not(body) = &e.body else { unreachable!() };
                quantifier(out, "forall", e, body);
            }
            Condition::ExistsSet { sort, var, body } if matches!(**body, Condition::Not(_)) => {
                let Condition::Not(inner) = &**body else { unreachable!() };
                set_quantifier(out, "all", sort, var, inner);
            }
            x => {
                out.push_str("not ");
                cond_text(x, out, 2);
            }
        },
        Condition::Exists(e) => quantifier(out, "exists", e, &e.body),
        Condition::ExistsSet { sort, var, body } => set_quantifier(out, "ex", sort, var, body),
        Condition::And(xs) | Condition::Or(xs) if xs.len() > 1 => {
            let (op, inner) = if matches!(c, Condition::And(_)) { (" and ", 2) } else { (" or ", 1) };
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                cond_text(x, out, inner);
            }
        }
        Condition::And(xs) => cond_text(&xs.first().cloned().unwrap_or(Condition::True), out, min),
        Condition::Or(xs) => cond_text(&xs.first().cloned().unwrap_or_else(Condition::falsity), out, min),
    }
    if paren {
        out.push(')');
    }
}

pub fn print_rule(r: &Rule) -> Result<String> {
    let mut out = format!("rule {} {{ left {} interface {} right {}", r.name, r.left, r.interface, r.right);
    if r.ac_left != Condition::True {
        write!(out, " acL: {};", print_condition(&r.ac_left)?).unwrap();
    }
    if r.ac_right != Condition::True {
        write!(out, " acR: {};", print_condition(&r.ac_right)?).unwrap();
    }
    out.push_str(" }");
    Ok(out)
}

/// The proof as an s-expression, conditions written as `(cond …)`.
pub fn print_proof(t: &ProofTree) -> Result<String> {
    fn go(t: &ProofTree, out: &mut String, indent: usize) -> Result<()> {
        let program = t.triple.program.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        write!(
            out,
            "({} (cond {}) \"{}\" (cond {})",
            t.kind(),
            print_condition(&t.triple.pre)?,
            program,
            print_condition(&t.triple.post)?
        )
        .unwrap();
        for child in t.children() {
            write!(out, "\n{}", "  ".repeat(indent + 1)).unwrap();
            go(child, out, indent + 1)?;
        }
        out.push(')');
        Ok(())
    }
    let mut out = String::new();
    go(t, &mut out, 0)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::satisfy::graph_satisfies;
    use crate::testkit::*;
    use proptest::prelude::*;

    const FIXTURE: &str = r#"
        // two-colourability and friends
        graph p3 { nodes: a, b, c; edges: x: a -> b, y: b -> c; }
        graph c3 { nodes: a, b, c; edges: x: a -> b, y: b -> c, z: c -> a; }
        condition emp = not exists({ nodes: v; });
        condition col = exV X [ exV Y [
            forall({ nodes: v; }, exists({ nodes: v; } | (v in X or v in Y) and not (v in X and v in Y)))
            and forall({ nodes: v, w; edges: e: v -> w; }, exists({ nodes: v, w; edges: e: v -> w; } | not (v in X and w in X) and not (v in Y and w in Y)))
        ]];
        condition tc over { nodes: 1; } = exists({ nodes: 1, a, b, c; });
        rule init { left {} right { nodes: 1; } }
        rule grow { left { nodes: 1; } right { nodes: 1, 2; edges: e: 1 -> 2; } acL: not tc; }
        program main = init; grow!
        mso bip = exists X:VS. forall e:E. not s(e) = t(e) => (s(e) in X <=> not t(e) in X);
    "#;

    #[test]
    fn workspace_declarations() {
        let ws = Workspace::parse(FIXTURE, None).unwrap();
        let col_c = &ws.condition("col").unwrap().condition;
        assert!(graph_satisfies(ws.graph("p3").unwrap(), col_c).unwrap());
        assert!(!graph_satisfies(ws.graph("c3").unwrap(), col_c).unwrap());
        for g in crate::universe::enumerate(&crate::universe::UniverseSpec::simple(3, false)) {
            assert_eq!(graph_satisfies(&g, col_c).unwrap(), graph_satisfies(&g, &col()).unwrap());
            assert_eq!(graph_satisfies(&g, &ws.condition("emp").unwrap().condition).unwrap(), graph_satisfies(&g, &emp()).unwrap());
        }
        assert_eq!(*ws.rule("grow").unwrap().as_ref(), grow());
        assert_eq!(ws.program("main").unwrap().to_string(), "init; grow!");
        assert!(ws.formula("bip").unwrap().size() > 5);
    }

    #[test]
    fn errors_carry_positions() {
        let err = Workspace::parse("graph g { nodes: a; }\ncondition c = exists({ nodes: a; } | a in X);", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Workspace::parse("program p = nothing;", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 13, .. }), "{err}");
        let err = parse_formula("exists x:V. y = x").unwrap_err();
        assert!(err.to_string().contains("unbound variable `y`"), "{err}");
    }

    #[test]
    fn programs_round_trip() {
        let ws = Workspace::parse(FIXTURE, None).unwrap();
        for src in ["init; grow!", "(init; grow)!", "if init then grow else skip", "try {init, grow} then skip else (init; grow!)!", "init; (if grow then skip else init); grow!!"] {
            let p = ws.parse_program(src).unwrap();
            assert_eq!(ws.parse_program(&p.to_string()).unwrap(), p, "{src}");
        }
    }

    #[test]
    fn rules_and_proofs_round_trip() {
        let ws = Workspace::parse(FIXTURE, None).unwrap();
        let r = ws.rule("grow").unwrap();
        let back = Workspace::parse(&print_rule(r).unwrap(), None);
        // `tc` is inlined by the printer, so the rule stands alone
        assert_eq!(*back.unwrap().rule("grow").unwrap(), *r);
        let proof = ws.parse_proof(r#"(cons emp "init" col (ruleapp (pre init col) init col))"#).unwrap();
        assert_eq!(ws.parse_proof(&print_proof(&proof).unwrap()).unwrap(), proof);
    }

    fn arb_graph() -> impl Strategy<Value = Arc<Graph>> {
        (0usize..4, proptest::collection::vec((0usize..4, 0usize..4, any::<bool>()), 0..4), any::<bool>()).prop_map(|(n, es, lab)| {
            let nodes: Vec<(Id, Label)> = (0..n).map(|i| (Id::from(format!("v{i}")), if lab && i == 0 { Label::from("red") } else { Label::blank() })).collect();
            let edges = if n == 0 {
                Vec::new()
            } else {
                es.iter().enumerate().map(|(k, &(s, t, l))| (Id::from(format!("e{k}")), Id::from(format!("v{}", s % n)), Id::from(format!("v{}", t % n)), if l { Label::from("blue") } else { Label::blank() })).collect()
            };
            Arc::new(Graph::from_parts(nodes, edges).unwrap())
        })
    }

    fn arb_constraint(items: Vec<Id>, nodes: Vec<Id>, edges: Vec<Id>, sets: Vec<Id>) -> BoxedStrategy<Constraint> {
        let mut leaves: Vec<BoxedStrategy<Constraint>> = vec![Just(Constraint::True).boxed(), Just(Constraint::falsity()).boxed()];
        if !items.is_empty() && !sets.is_empty() {
            leaves.push((proptest::sample::select(items.clone()), proptest::sample::select(sets)).prop_map(|(i, s)| Constraint::member(i, s)).boxed());
        }
        if !nodes.is_empty() {
            let n = edges.len().min(2);
            leaves.push((proptest::sample::select(nodes.clone()), proptest::sample::select(nodes), proptest::sample::subsequence(edges, 0..=n)).prop_map(|(a, b, av)| Constraint::path(a, b, av)).boxed());
        }
        proptest::strategy::Union::new(leaves)
            .prop_recursive(2, 8, 3, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|x| Constraint::Not(Box::new(x))),
                    proptest::collection::vec(inner.clone(), 2..4).prop_map(Constraint::And),
                    proptest::collection::vec(inner, 2..4).prop_map(Constraint::Or),
                ]
            })
            .boxed()
    }

    // conditions whose set binders are distinct and whose quantified graphs extend the context
    fn arb_condition(ctx: Arc<Graph>, depth: u32, sets: Vec<Id>) -> BoxedStrategy<Condition> {
        let leaf = Just(Condition::True).boxed();
        if depth == 0 {
            return leaf;
        }
        let extend = {
            let ctx = ctx.clone();
            let sets = sets.clone();
            (0usize..3, any::<bool>()).prop_flat_map(move |(extra, edge)| {
                let mut nodes: Vec<(Id, Label)> = ctx.nodes().iter().map(|n| (n.id.clone(), n.label.clone())).collect();
                let mut edges: Vec<(Id, Id, Id, Label)> = ctx.edges().iter().map(|e| (e.id.clone(), ctx.node(e.source).id.clone(), ctx.node(e.target).id.clone(), e.label.clone())).collect();
                for k in 0..extra {
                    nodes.push((Id::from(format!("d{depth}_{k}")), Label::blank()));
                }
                if edge && !nodes.is_empty() {
                    let (s, t) = (nodes[0].0.clone(), nodes[nodes.len() - 1].0.clone());
                    edges.push((Id::from(format!("f{depth}")), s, t, Label::blank()));
                }
                let cod = Arc::new(Graph::from_parts(nodes, edges).unwrap());
                let m = Morphism::inclusion(ctx.clone(), cod.clone()).unwrap();
                let items: Vec<Id> = cod.ids().into_iter().collect();
                let nodes: Vec<Id> = cod.nodes().iter().map(|n| n.id.clone()).collect();
                let edges: Vec<Id> = cod.edges().iter().map(|e| e.id.clone()).collect();
                (arb_constraint(items, nodes, edges, sets.clone()), arb_condition(cod, depth - 1, sets.clone()), any::<bool>()).prop_map(move |(gamma, body, neg)| {
                    if neg {
                        Condition::forall(m.clone(), gamma, body)
                    } else {
                        Condition::exists(m.clone(), gamma, body)
                    }
                })
            })
        };
        let bind = {
            let ctx = ctx.clone();
            let var = Id::from(format!("X{depth}"));
            let mut inner = sets.clone();
            inner.push(var.clone());
            (any::<bool>(), any::<bool>(), arb_condition(ctx, depth - 1, inner)).prop_map(move |(nodes, neg, body)| {
                let sort = if nodes { SetSort::Nodes } else { SetSort::Edges };
                if neg {
                    Condition::forall_set(sort, var.clone(), body)
                } else {
                    Condition::exists_set(sort, var.clone(), body)
                }
            })
        };
        let ctx2 = ctx.clone();
        let sets2 = sets.clone();
        prop_oneof![
            leaf,
            extend,
            bind,
            arb_condition(ctx.clone(), depth - 1, sets.clone()).prop_map(Condition::not),
            proptest::collection::vec(arb_condition(ctx2, depth - 1, sets2), 2..4).prop_map(Condition::And),
            proptest::collection::vec(arb_condition(ctx, depth - 1, sets), 2..4).prop_map(Condition::Or),
        ]
        .boxed()
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            Just(Formula::VertexEq(VTerm::Var("x".into()), VTerm::Source("e".into()))),
            Just(Formula::EdgeEq("e".into(), "e".into())),
            Just(Formula::VertexLabel(VTerm::Target("e".into()), Label::blank())),
            Just(Formula::EdgeLabel("e".into(), Label::from("red"))),
            Just(Formula::VertexIn(VTerm::Var("x".into()), "X".into())),
            Just(Formula::EdgeIn("e".into(), "Y".into())),
        ];
        let body = leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
                (inner.clone(), any::<bool>()).prop_map(|(a, ex)| if ex { Formula::exists("z", Sort::Vertex, a) } else { Formula::forall("z", Sort::Vertex, a) }),
            ]
        });
        body.prop_map(|f| Formula::exists("X", Sort::VertexSet, Formula::forall("Y", Sort::EdgeSet, Formula::exists("x", Sort::Vertex, Formula::forall("e", Sort::Edge, f)))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn graphs_round_trip(g in arb_graph()) {
            let ws = Workspace::parse("alphabet { nodes: blank, red; edges: blank, blue; }", None).unwrap();
            prop_assert_eq!(ws.parse_graph(&g.to_string()).unwrap(), g);
        }

        #[test]
        fn conditions_round_trip(c in arb_condition(Arc::new(Graph::empty()), 3, Vec::new())) {
            // sibling binders may share a name; the parser would rename them apart
            let c = c.uniquify_set_vars();
            let text = print_condition(&c).unwrap();
            let back = parse_constraint(&text);
            prop_assert!(back.is_ok(), "{}: {:?}", text, back);
            prop_assert_eq!(back.unwrap(), c, "{}", text);
        }

        #[test]
        fn formulas_round_trip(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
        }
    }
}
