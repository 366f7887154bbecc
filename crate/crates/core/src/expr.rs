//! A small whitelisted expression language for closed-form fields.
//!
//! Grammar: numbers, named variables, `+ - * / ^`, parentheses, the constant
//! `pi`, and the functions `abs sin cos exp min max`. `^` is right
//! associative and binds tighter than unary minus.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Abs,
    Sin,
    Cos,
    Exp,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "abs" => (Func::Abs, 1),
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "exp" => (Func::Exp, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            _ => return None,
        })
    }
}

/// A parsed expression bound to an ordered list of variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    vars: Vec<String>,
    root: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expr(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some((func, arity)) = Func::lookup(&name) {
                    self.expect('(')?;
                    let mut args = vec![self.sum()?];
                    while self.eat(',') {
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    if args.len() != arity {
                        return Err(Error::Expr(format!(
                            "{name} takes {arity} argument(s), got {}",
                            args.len()
                        )));
                    }
                    Ok(Node::Call(func, args))
                } else if name == "pi" {
                    Ok(Node::Num(std::f64::consts::PI))
                } else if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(idx))
                } else {
                    Err(Error::Expr(format!(
                        "unknown identifier '{name}' (allowed variables: {})",
                        self.vars.join(", ")
                    )))
                }
            }
            Some(tok) => Err(Error::Expr(format!("unexpected token {tok:?}"))),
            None => Err(Error::Expr("unexpected end of expression".into())),
        }
    }
}

fn eval_node(node: &Node, vars: &[f64]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(i) => vars[*i],
        Node::Neg(a) => -eval_node(a, vars),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval_node(a, vars), eval_node(b, vars));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => a.powf(b),
            }
        }
        Node::Call(func, args) => {
            let a = eval_node(&args[0], vars);
            match func {
                Func::Abs => a.abs(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Min => a.min(eval_node(&args[1], vars)),
                Func::Max => a.max(eval_node(&args[1], vars)),
            }
        }
    }
}

impl Expr {
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self> {
        let mut parser = Parser {
            toks: tokenize(source)?,
            pos: 0,
            vars,
        };
        let root = parser.sum()?;
        if parser.pos != parser.toks.len() {
            return Err(Error::Expr(format!(
                "trailing input after position {} in '{source}'",
                parser.pos
            )));
        }
        Ok(Self {
            source: source.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            root,
        })
    }

    /// Evaluates with `vars` in the order given at parse time.
    pub fn eval(&self, vars: &[f64]) -> f64 {
        debug_assert_eq!(vars.len(), self.vars.len());
        eval_node(&self.root, vars)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}
