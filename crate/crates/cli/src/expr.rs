//! Text grammar for quantizable observables.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := number | 'i' | ident | func '(' expr ')' | '(' expr ')'
//! func   := cos | sin | exp
//! ident  := 'A' digits | 'phi' digits      (1-based axis labels)
//! ```
//!
//! Lowering rules: exp of an integer imaginary combination of angles becomes
//! a composite shift (e^{+i phi_k} lowers m_k); cos and sin of integer real
//! combinations expand into the matching pair of shifts; cos/sin/exp of
//! angle-free subexpressions become diagonal action functions; products are
//! validated against the quantizable class (at most linear in the actions
//! when an angle factor is present).

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use bsh_core::quantize::{ActionFactor, ActionFn, ObservableExpr, Term};

/// Byte range of a node in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn cover(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncKind {
    Cos,
    Sin,
    Exp,
}

impl FuncKind {
    fn name(self) -> &'static str {
        match self {
            FuncKind::Cos => "cos",
            FuncKind::Sin => "sin",
            FuncKind::Exp => "exp",
        }
    }
}

/// Parse tree with constant folding already applied. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct ExprAst {
    pub kind: AstKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum AstKind {
    Const(Complex64),
    /// A_{i+1} in source labels.
    Action(usize),
    /// phi_{i+1} in source labels.
    Angle(usize),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Func(FuncKind, Box<ExprAst>),
}

impl PartialEq for ExprAst {
    fn eq(&self, other: &Self) -> bool {
        use AstKind::*;
        match (&self.kind, &other.kind) {
            (Const(a), Const(b)) => a == b,
            (Action(a), Action(b)) | (Angle(a), Angle(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Add(a1, a2), Add(b1, b2))
            | (Sub(a1, a2), Sub(b1, b2))
            | (Mul(a1, a2), Mul(b1, b2)) => a1 == b1 && a2 == b2,
            (Func(f, a), Func(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprError {
    Syntax {
        pos: usize,
        message: String,
    },
    UnknownIdent {
        span: Span,
        name: String,
    },
    Unquantizable {
        span: Span,
        term: String,
        reason: String,
    },
}

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExprError::Syntax { pos, message } => {
                write!(f, "syntax error at byte {pos}: {message}")
            }
            ExprError::UnknownIdent { span, name } => {
                write!(f, "unknown identifier `{name}` at byte {}", span.start)
            }
            ExprError::Unquantizable { term, reason, .. } => {
                write!(f, "term `{term}` is not quantizable: {reason}")
            }
        }
    }
}

impl std::error::Error for ExprError {}

// ---------------------------------------------------------------- tokenizer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Word(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Span)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' | '-' | '*' | '(' | ')' => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                i += 1;
                out.push((tok, Span { start, end: i }));
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    message: format!("invalid number literal `{lit}`"),
                })?;
                out.push((Tok::Num(value), Span { start, end: i }));
            }
            'a'..='z' | 'A'..='Z' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push((
                    Tok::Word(text[start..i].to_string()),
                    Span { start, end: i },
                ));
            }
            other => {
                return Err(ExprError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

// ------------------------------------------------------------------- parser

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    dof: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, Span)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, s)| s.start)
            .unwrap_or(self.text.len())
    }

    fn expect_rparen(&mut self) -> Result<Span, ExprError> {
        match self.next() {
            Some((Tok::RParen, s)) => Ok(s),
            other => Err(ExprError::Syntax {
                pos: other.map(|(_, s)| s.start).unwrap_or(self.text.len()),
                message: "expected `)`".to_string(),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<ExprAst, ExprError> {
        // Optional leading sign on the first term.
        let mut node = match self.peek() {
            Some((Tok::Minus, s)) => {
                let s = *s;
                self.pos += 1;
                let t = self.parse_term()?;
                let span = s.cover(t.span);
                ExprAst {
                    kind: AstKind::Neg(Box::new(t)),
                    span,
                }
            }
            Some((Tok::Plus, _)) => {
                self.pos += 1;
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.peek() {
                Some((Tok::Plus, _)) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    let span = node.span.cover(rhs.span);
                    node = ExprAst {
                        kind: AstKind::Add(Box::new(node), Box::new(rhs)),
                        span,
                    };
                }
                Some((Tok::Minus, _)) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    let span = node.span.cover(rhs.span);
                    node = ExprAst {
                        kind: AstKind::Sub(Box::new(node), Box::new(rhs)),
                        span,
                    };
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn parse_term(&mut self) -> Result<ExprAst, ExprError> {
        let mut node = self.parse_factor()?;
        while let Some((Tok::Star, _)) = self.peek() {
            self.pos += 1;
            let rhs = self.parse_factor()?;
            let span = node.span.cover(rhs.span);
            node = ExprAst {
                kind: AstKind::Mul(Box::new(node), Box::new(rhs)),
                span,
            };
        }
        Ok(node)
    }

    fn parse_factor(&mut self) -> Result<ExprAst, ExprError> {
        match self.next() {
            Some((Tok::Num(v), span)) => Ok(ExprAst {
                kind: AstKind::Const(Complex64::new(v, 0.0)),
                span,
            }),
            Some((Tok::LParen, lspan)) => {
                let inner = self.parse_expr()?;
                let rspan = self.expect_rparen()?;
                Ok(ExprAst {
                    kind: inner.kind,
                    span: lspan.cover(rspan),
                })
            }
            Some((Tok::Word(w), span)) => self.resolve_word(w, span),
            other => Err(ExprError::Syntax {
                pos: other.map(|(_, s)| s.start).unwrap_or(self.text.len()),
                message: "expected a number, identifier or `(`".to_string(),
            }),
        }
    }

    fn resolve_word(&mut self, w: String, span: Span) -> Result<ExprAst, ExprError> {
        if w == "i" {
            return Ok(ExprAst {
                kind: AstKind::Const(Complex64::new(0.0, 1.0)),
                span,
            });
        }
        if let Some(kind) = match w.as_str() {
            "cos" => Some(FuncKind::Cos),
            "sin" => Some(FuncKind::Sin),
            "exp" => Some(FuncKind::Exp),
            _ => None,
        } {
            match self.next() {
                Some((Tok::LParen, _)) => {}
                other => {
                    return Err(ExprError::Syntax {
                        pos: other.map(|(_, s)| s.start).unwrap_or(self.text.len()),
                        message: format!("expected `(` after `{w}`"),
                    });
                }
            }
            let arg = self.parse_expr()?;
            let rspan = self.expect_rparen()?;
            return Ok(ExprAst {
                kind: AstKind::Func(kind, Box::new(arg)),
                span: span.cover(rspan),
            });
        }
        let axis = |digits: &str| -> Option<usize> { digits.parse::<usize>().ok() };
        if let Some(rest) = w.strip_prefix("phi") {
            if let Some(k) = axis(rest) {
                if k >= 1 && k <= self.dof {
                    return Ok(ExprAst {
                        kind: AstKind::Angle(k - 1),
                        span,
                    });
                }
            }
        } else if let Some(rest) = w.strip_prefix('A') {
            if let Some(k) = axis(rest) {
                if k >= 1 && k <= self.dof {
                    return Ok(ExprAst {
                        kind: AstKind::Action(k - 1),
                        span,
                    });
                }
            }
        }
        Err(ExprError::UnknownIdent { span, name: w })
    }
}

/// Parse and constant-fold an observable expression over `n` degrees of
/// freedom.
pub fn parse_expr(text: &str, n: usize) -> Result<ExprAst, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Syntax {
            pos: 0,
            message: "empty expression".to_string(),
        });
    }
    let toks = tokenize(text)?;
    let mut parser = Parser {
        text,
        toks,
        pos: 0,
        dof: n,
    };
    let ast = parser.parse_expr()?;
    if parser.pos != parser.toks.len() {
        return Err(ExprError::Syntax {
            pos: parser.here(),
            message: "unexpected trailing input".to_string(),
        });
    }
    Ok(fold(ast))
}

/// Fold constant subtrees bottom-up.
fn fold(ast: ExprAst) -> ExprAst {
    let span = ast.span;
    let kind = match ast.kind {
        AstKind::Neg(e) => {
            let e = fold(*e);
            match e.kind {
                AstKind::Const(c) => AstKind::Const(-c),
                other => AstKind::Neg(Box::new(ExprAst { kind: other, span: e.span })),
            }
        }
        AstKind::Add(l, r) => fold_binop(*l, *r, span, |a, b| a + b, AstKind::Add),
        AstKind::Sub(l, r) => fold_binop(*l, *r, span, |a, b| a - b, AstKind::Sub),
        AstKind::Mul(l, r) => fold_binop(*l, *r, span, |a, b| a * b, AstKind::Mul),
        AstKind::Func(kind, arg) => {
            let arg = fold(*arg);
            match arg.kind {
                AstKind::Const(c) => AstKind::Const(match kind {
                    FuncKind::Cos => c.cos(),
                    FuncKind::Sin => c.sin(),
                    FuncKind::Exp => c.exp(),
                }),
                other => AstKind::Func(
                    kind,
                    Box::new(ExprAst { kind: other, span: arg.span }),
                ),
            }
        }
        leaf => leaf,
    };
    ExprAst { kind, span }
}

fn fold_binop(
    l: ExprAst,
    r: ExprAst,
    span: Span,
    op: impl Fn(Complex64, Complex64) -> Complex64,
    wrap: impl Fn(Box<ExprAst>, Box<ExprAst>) -> AstKind,
) -> AstKind {
    let l = fold(l);
    let r = fold(r);
    match (&l.kind, &r.kind) {
        (AstKind::Const(a), AstKind::Const(b)) => AstKind::Const(op(*a, *b)),
        _ => {
            let _ = span;
            wrap(Box::new(l), Box::new(r))
        }
    }
}

// ----------------------------------------------------------------- lowering

/// Tolerance for recognizing integer angle coefficients after folding.
const INT_TOL: f64 = 1e-9;

#[derive(Clone)]
enum LAction {
    None,
    Linear(usize),
    Func(ActionFn),
}

#[derive(Clone)]
struct LTerm {
    coeff: Complex64,
    action: LAction,
    angle: Vec<i64>,
}

impl LTerm {
    fn constant(n: usize, c: Complex64) -> Self {
        LTerm {
            coeff: c,
            action: LAction::None,
            angle: vec![0; n],
        }
    }
}

/// Lower a parsed expression to a quantizable observable.
pub fn lower(ast: &ExprAst, n: usize, src: &str) -> Result<ObservableExpr, ExprError> {
    let terms = lower_node(ast, n, src)?;
    let terms = terms
        .into_iter()
        .map(|t| Term {
            coeff: t.coeff,
            action: match t.action {
                LAction::None => None,
                LAction::Linear(i) => Some(ActionFactor::Linear(i)),
                LAction::Func(f) => Some(ActionFactor::Function(f)),
            },
            angle: t.angle,
        })
        .collect();
    Ok(ObservableExpr::new(terms))
}

fn quote<'s>(src: &'s str, span: Span) -> &'s str {
    src.get(span.start..span.end).unwrap_or("<expression>")
}

fn lower_node(ast: &ExprAst, n: usize, src: &str) -> Result<Vec<LTerm>, ExprError> {
    match &ast.kind {
        AstKind::Const(c) => Ok(vec![LTerm::constant(n, *c)]),
        AstKind::Action(i) => Ok(vec![LTerm {
            coeff: Complex64::new(1.0, 0.0),
            action: LAction::Linear(*i),
            angle: vec![0; n],
        }]),
        AstKind::Angle(_) => Err(ExprError::Unquantizable {
            span: ast.span,
            term: quote(src, ast.span).to_string(),
            reason: "a bare angle is not quantizable; only cos, sin and exp of angles are"
                .to_string(),
        }),
        AstKind::Neg(e) => {
            let mut terms = lower_node(e, n, src)?;
            for t in &mut terms {
                t.coeff = -t.coeff;
            }
            Ok(terms)
        }
        AstKind::Add(l, r) => {
            let mut terms = lower_node(l, n, src)?;
            terms.extend(lower_node(r, n, src)?);
            Ok(terms)
        }
        AstKind::Sub(l, r) => {
            let mut terms = lower_node(l, n, src)?;
            for mut t in lower_node(r, n, src)? {
                t.coeff = -t.coeff;
                terms.push(t);
            }
            Ok(terms)
        }
        AstKind::Mul(l, r) => {
            let lt = lower_node(l, n, src)?;
            let rt = lower_node(r, n, src)?;
            let mut out = Vec::with_capacity(lt.len() * rt.len());
            for a in &lt {
                for b in &rt {
                    out.push(multiply_terms(a, b, ast.span, src)?);
                }
            }
            Ok(out)
        }
        AstKind::Func(kind, arg) => lower_func(*kind, arg, ast.span, n, src),
    }
}

fn multiply_terms(a: &LTerm, b: &LTerm, span: Span, src: &str) -> Result<LTerm, ExprError> {
    let coeff = a.coeff * b.coeff;
    // Classical products multiply: angle exponents add, and opposite
    // exponentials cancel, so quantizability is judged on the combined term.
    let angle: Vec<i64> = a.angle.iter().zip(&b.angle).map(|(x, y)| x + y).collect();
    let has_angle = angle.iter().any(|&k| k != 0);
    let action = match (&a.action, &b.action) {
        (LAction::None, other) | (other, LAction::None) => other.clone(),
        (x, y) => {
            if has_angle {
                return Err(ExprError::Unquantizable {
                    span,
                    term: quote(src, span).to_string(),
                    reason: "terms with an angle factor may be at most linear in the actions"
                        .to_string(),
                });
            }
            product_action(x, y)
        }
    };
    if has_angle && matches!(action, LAction::Func(_)) {
        return Err(ExprError::Unquantizable {
            span,
            term: quote(src, span).to_string(),
            reason: "a general action function may not carry an angle factor".to_string(),
        });
    }
    Ok(LTerm {
        coeff,
        action,
        angle,
    })
}

fn product_action(x: &LAction, y: &LAction) -> LAction {
    let as_fn = |a: &LAction| -> ActionFn {
        match a {
            LAction::Linear(i) => {
                let i = *i;
                Arc::new(move |acts: &[f64]| Complex64::new(acts[i], 0.0))
            }
            LAction::Func(f) => f.clone(),
            LAction::None => unreachable!("handled by the caller"),
        }
    };
    let (f, g) = (as_fn(x), as_fn(y));
    LAction::Func(Arc::new(move |acts: &[f64]| f(acts) * g(acts)))
}

fn lower_func(
    kind: FuncKind,
    arg: &ExprAst,
    span: Span,
    n: usize,
    src: &str,
) -> Result<Vec<LTerm>, ExprError> {
    if !contains_angle(arg) {
        // Angle-free argument: an analytic function of the actions.
        let evaluator = build_pure_evaluator(arg)?;
        let f: ActionFn = Arc::new(move |acts: &[f64]| {
            let v = evaluator(acts);
            match kind {
                FuncKind::Cos => v.cos(),
                FuncKind::Sin => v.sin(),
                FuncKind::Exp => v.exp(),
            }
        });
        return Ok(vec![LTerm {
            coeff: Complex64::new(1.0, 0.0),
            action: LAction::Func(f),
            angle: vec![0; n],
        }]);
    }

    // Angle-bearing argument: must be affine in the angles with constant
    // coefficients.
    let Some((c0, coeffs)) = affine_in_angles(arg, n) else {
        return Err(ExprError::Unquantizable {
            span,
            term: quote(src, span).to_string(),
            reason: format!(
                "the argument of {} must be affine in the angle variables",
                kind.name()
            ),
        });
    };
    match kind {
        FuncKind::Exp => {
            // exp(c0 + sum_j beta_j phi_j) quantizes when beta_j = i k_j.
            let mut k = vec![0i64; n];
            for (j, beta) in coeffs.iter().enumerate() {
                let rounded = beta.im.round();
                if beta.re.abs() > INT_TOL || (beta.im - rounded).abs() > INT_TOL {
                    return Err(ExprError::Unquantizable {
                        span,
                        term: quote(src, span).to_string(),
                        reason: "exp of angles needs integer multiples of i*phi".to_string(),
                    });
                }
                k[j] = rounded as i64;
            }
            Ok(vec![LTerm {
                coeff: c0.exp(),
                action: LAction::None,
                angle: k,
            }])
        }
        FuncKind::Cos | FuncKind::Sin => {
            // cos(k.phi + c0) = e^{i c0} e^{i k.phi}/2 + e^{-i c0} e^{-i k.phi}/2,
            // sin likewise with (2i) and a sign.
            let mut k = vec![0i64; n];
            for (j, beta) in coeffs.iter().enumerate() {
                let rounded = beta.re.round();
                if beta.im.abs() > INT_TOL || (beta.re - rounded).abs() > INT_TOL {
                    return Err(ExprError::Unquantizable {
                        span,
                        term: quote(src, span).to_string(),
                        reason: format!(
                            "{} of angles needs integer coefficients on phi",
                            kind.name()
                        ),
                    });
                }
                k[j] = rounded as i64;
            }
            let i = Complex64::new(0.0, 1.0);
            let phase = (i * c0).exp();
            let phase_conj = (-i * c0).exp();
            let neg_k: Vec<i64> = k.iter().map(|&x| -x).collect();
            let (c_plus, c_minus) = match kind {
                FuncKind::Cos => (phase * 0.5, phase_conj * 0.5),
                FuncKind::Sin => (phase / (2.0 * i), -phase_conj / (2.0 * i)),
                FuncKind::Exp => unreachable!(),
            };
            Ok(vec![
                LTerm {
                    coeff: c_plus,
                    action: LAction::None,
                    angle: k,
                },
                LTerm {
                    coeff: c_minus,
                    action: LAction::None,
                    angle: neg_k,
                },
            ])
        }
    }
}

fn contains_angle(ast: &ExprAst) -> bool {
    match &ast.kind {
        AstKind::Angle(_) => true,
        AstKind::Const(_) | AstKind::Action(_) => false,
        AstKind::Neg(e) | AstKind::Func(_, e) => contains_angle(e),
        AstKind::Add(l, r) | AstKind::Sub(l, r) | AstKind::Mul(l, r) => {
            contains_angle(l) || contains_angle(r)
        }
    }
}

/// Build a closure evaluating an angle-free subtree on the action tuple.
fn build_pure_evaluator(
    ast: &ExprAst,
) -> Result<Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>, ExprError> {
    let owned = ast.clone();
    Ok(Arc::new(move |acts: &[f64]| eval_pure(&owned, acts)))
}

fn eval_pure(ast: &ExprAst, acts: &[f64]) -> Complex64 {
    match &ast.kind {
        AstKind::Const(c) => *c,
        AstKind::Action(i) => Complex64::new(acts[*i], 0.0),
        AstKind::Angle(_) => unreachable!("angle-free subtree"),
        AstKind::Neg(e) => -eval_pure(e, acts),
        AstKind::Add(l, r) => eval_pure(l, acts) + eval_pure(r, acts),
        AstKind::Sub(l, r) => eval_pure(l, acts) - eval_pure(r, acts),
        AstKind::Mul(l, r) => eval_pure(l, acts) * eval_pure(r, acts),
        AstKind::Func(kind, e) => {
            let v = eval_pure(e, acts);
            match kind {
                FuncKind::Cos => v.cos(),
                FuncKind::Sin => v.sin(),
                FuncKind::Exp => v.exp(),
            }
        }
    }
}

/// Affine form c0 + sum_j beta_j phi_j with constant coefficients; `None`
/// when the subtree is not of that shape (actions inside, products of
/// angles, functions of angles).
fn affine_in_angles(ast: &ExprAst, n: usize) -> Option<(Complex64, Vec<Complex64>)> {
    let zero = || vec![Complex64::default(); n];
    match &ast.kind {
        AstKind::Const(c) => Some((*c, zero())),
        AstKind::Angle(j) => {
            let mut coeffs = zero();
            coeffs[*j] = Complex64::new(1.0, 0.0);
            Some((Complex64::default(), coeffs))
        }
        AstKind::Action(_) | AstKind::Func(..) => None,
        AstKind::Neg(e) => {
            let (c, coeffs) = affine_in_angles(e, n)?;
            Some((-c, coeffs.into_iter().map(|b| -b).collect()))
        }
        AstKind::Add(l, r) | AstKind::Sub(l, r) => {
            let sign = if matches!(ast.kind, AstKind::Sub(..)) {
                -1.0
            } else {
                1.0
            };
            let (cl, bl) = affine_in_angles(l, n)?;
            let (cr, br) = affine_in_angles(r, n)?;
            Some((
                cl + cr * sign,
                bl.into_iter()
                    .zip(br)
                    .map(|(x, y)| x + y * sign)
                    .collect(),
            ))
        }
        AstKind::Mul(l, r) => {
            let (cl, bl) = affine_in_angles(l, n)?;
            let (cr, br) = affine_in_angles(r, n)?;
            let l_const = bl.iter().all(|b| *b == Complex64::default());
            let r_const = br.iter().all(|b| *b == Complex64::default());
            if l_const {
                Some((cl * cr, br.into_iter().map(|b| b * cl).collect()))
            } else if r_const {
                Some((cl * cr, bl.into_iter().map(|b| b * cr).collect()))
            } else {
                None
            }
        }
    }
}

// ----------------------------------------------------------- pretty printer

/// Render an AST back to grammar-conformant text; `parse_expr` of the result
/// reproduces the AST.
pub fn pretty_print(ast: &ExprAst) -> String {
    let mut out = String::new();
    print_expr(ast, &mut out);
    out
}

fn print_expr(ast: &ExprAst, out: &mut String) {
    match &ast.kind {
        AstKind::Add(l, r) => {
            print_expr(l, out);
            out.push_str(" + ");
            print_term(r, out);
        }
        AstKind::Sub(l, r) => {
            print_expr(l, out);
            out.push_str(" - ");
            print_term(r, out);
        }
        AstKind::Neg(e) => {
            out.push('-');
            print_term(e, out);
        }
        _ => print_term(ast, out),
    }
}

fn print_term(ast: &ExprAst, out: &mut String) {
    match &ast.kind {
        AstKind::Mul(l, r) => {
            print_term(l, out);
            out.push('*');
            print_factor(r, out);
        }
        _ => print_factor(ast, out),
    }
}

fn print_factor(ast: &ExprAst, out: &mut String) {
    match &ast.kind {
        AstKind::Const(c) => print_const(*c, out),
        AstKind::Action(i) => {
            let _ = write!(out, "A{}", i + 1);
        }
        AstKind::Angle(i) => {
            let _ = write!(out, "phi{}", i + 1);
        }
        AstKind::Func(kind, arg) => {
            out.push_str(kind.name());
            out.push('(');
            print_expr(arg, out);
            out.push(')');
        }
        // Lower-precedence nodes are parenthesized at factor position.
        _ => {
            out.push('(');
            print_expr(ast, out);
            out.push(')');
        }
    }
}

fn print_const(c: Complex64, out: &mut String) {
    if c.im == 0.0 {
        if c.re < 0.0 || c.re.is_sign_negative() {
            let _ = write!(out, "(-{})", -c.re);
        } else {
            let _ = write!(out, "{}", c.re);
        }
    } else if c.re == 0.0 && !c.re.is_sign_negative() {
        if c.im == 1.0 {
            out.push('i');
        } else if c.im == -1.0 {
            out.push_str("(-i)");
        } else if c.im < 0.0 {
            let _ = write!(out, "(-{}*i)", -c.im);
        } else {
            let _ = write!(out, "({}*i)", c.im);
        }
    } else {
        // Full complex constant.
        out.push('(');
        if c.re < 0.0 || c.re.is_sign_negative() {
            let _ = write!(out, "-{}", -c.re);
        } else {
            let _ = write!(out, "{}", c.re);
        }
        if c.im < 0.0 {
            let _ = write!(out, " - {}*i", -c.im);
        } else {
            let _ = write!(out, " + {}*i", c.im);
        }
        out.push(')');
    }
}
