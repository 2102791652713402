use super::ast::*;
use super::lexer::{tokenize, Spanned, Token};
use super::{safety, ParseError};

pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut program = Program::default();
    while parser.peek() != &Token::Eof {
        let (line, col) = parser.position();
        match parser.statement()? {
            Statement::Rule(rule) => {
                if let Err(variable) = safety::check_rule(&rule) {
                    return Err(ParseError::UnsafeRule {
                        line,
                        statement: rule.to_string(),
                        variable,
                    });
                }
                program.rules.push(rule);
            }
            Statement::Weak(weak) => {
                if let Err(variable) = safety::check_weak(&weak) {
                    return Err(ParseError::UnsafeRule {
                        line,
                        statement: weak.to_string(),
                        variable,
                    });
                }
                program.weak_constraints.push(weak);
            }
            Statement::Query(atom) => {
                if program.query.is_some() {
                    return Err(ParseError::DuplicateQuery { line, col });
                }
                program.query = Some(atom);
            }
        }
    }
    Ok(program)
}

/// Parses a whitespace-separated sequence of ground facts such as
/// `cycle(1,4). cycle(4,3).` into atoms.
pub fn parse_facts(source: &str) -> Result<Vec<Atom>, ParseError> {
    let program = parse_program(source)?;
    let mut atoms = Vec::with_capacity(program.rules.len());
    for rule in program.rules {
        match (rule.head, rule.body.is_empty()) {
            (Head::Normal(atom), true) if atom.is_ground() => atoms.push(atom),
            (head, _) => {
                return Err(ParseError::syntax(
                    1,
                    1,
                    vec!["ground fact".into()],
                    format!("`{head}`"),
                ))
            }
        }
    }
    if !program.weak_constraints.is_empty() || program.query.is_some() {
        return Err(ParseError::syntax(
            1,
            1,
            vec!["ground fact".into()],
            "non-fact statement".into(),
        ));
    }
    Ok(atoms)
}

enum Statement {
    Rule(Rule),
    Weak(WeakConstraint),
    Query(Atom),
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn position(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].token.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let (line, col) = self.position();
        Err(ParseError::syntax(
            line,
            col,
            expected.iter().map(|s| s.to_string()).collect(),
            self.peek().to_string(),
        ))
    }

    fn expect(&mut self, token: Token) -> Result<(), ParseError> {
        if self.peek() == &token {
            self.bump();
            Ok(())
        } else {
            self.error(&[&token.to_string()])
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        match self.peek() {
            Token::WeakIf => self.weak_constraint().map(Statement::Weak),
            Token::If => {
                self.bump();
                let body = self.body()?;
                self.expect(Token::Dot)?;
                Ok(Statement::Rule(Rule {
                    head: Head::Constraint,
                    body,
                }))
            }
            Token::LBrace => {
                let head = self.choice_head()?;
                let body = self.rule_tail()?;
                Ok(Statement::Rule(Rule { head, body }))
            }
            _ => {
                let first = self.atom()?;
                match self.peek() {
                    Token::Question => {
                        self.bump();
                        Ok(Statement::Query(first))
                    }
                    Token::Bar => {
                        let mut atoms = vec![first];
                        while self.peek() == &Token::Bar {
                            self.bump();
                            atoms.push(self.atom()?);
                        }
                        let body = self.rule_tail()?;
                        Ok(Statement::Rule(Rule {
                            head: Head::Disjunctive(atoms),
                            body,
                        }))
                    }
                    Token::If | Token::Dot => {
                        let body = self.rule_tail()?;
                        Ok(Statement::Rule(Rule {
                            head: Head::Normal(first),
                            body,
                        }))
                    }
                    _ => self.error(&["`.`", "`:-`", "`|`", "`?`"]),
                }
            }
        }
    }

    /// `.` or `:- body .`
    fn rule_tail(&mut self) -> Result<Vec<BodyElement>, ParseError> {
        match self.peek() {
            Token::Dot => {
                self.bump();
                Ok(Vec::new())
            }
            Token::If => {
                self.bump();
                let body = self.body()?;
                self.expect(Token::Dot)?;
                Ok(body)
            }
            _ => self.error(&["`.`", "`:-`"]),
        }
    }

    fn weak_constraint(&mut self) -> Result<WeakConstraint, ParseError> {
        self.expect(Token::WeakIf)?;
        let body = self.body()?;
        self.expect(Token::Dot)?;
        self.expect(Token::LBracket)?;
        let weight = self.term()?;
        let level = if self.peek() == &Token::At {
            self.bump();
            self.term()?
        } else {
            Term::Integer(0)
        };
        let mut tuple = Vec::new();
        while self.peek() == &Token::Comma {
            self.bump();
            tuple.push(self.term()?);
        }
        self.expect(Token::RBracket)?;
        Ok(WeakConstraint {
            body,
            weight,
            level,
            tuple,
        })
    }

    fn choice_head(&mut self) -> Result<Head, ParseError> {
        self.expect(Token::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != &Token::RBrace {
            loop {
                let atom = self.atom()?;
                let condition = if self.peek() == &Token::Colon {
                    self.bump();
                    self.literals()?
                } else {
                    Vec::new()
                };
                elements.push(ChoiceElement { atom, condition });
                if self.peek() == &Token::Semicolon {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::RBrace)?;
        let bound = match self.peek() {
            Token::Op(op) => {
                let op = match *op {
                    "=" => CompareOp::Eq,
                    "<=" => CompareOp::Le,
                    ">=" => CompareOp::Ge,
                    _ => return self.error(&["`=`", "`<=`", "`>=`"]),
                };
                self.bump();
                let value = self.integer()?;
                Some(ChoiceBound { op, value })
            }
            _ => None,
        };
        Ok(Head::Choice { elements, bound })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        match self.term()? {
            Term::Integer(v) => Ok(v),
            _ => self.error(&["integer"]),
        }
    }

    fn body(&mut self) -> Result<Vec<BodyElement>, ParseError> {
        let mut body = vec![self.body_element()?];
        while self.peek() == &Token::Comma {
            self.bump();
            body.push(self.body_element()?);
        }
        Ok(body)
    }

    fn body_element(&mut self) -> Result<BodyElement, ParseError> {
        let negated = if self.peek() == &Token::Not {
            self.bump();
            true
        } else {
            false
        };
        if let Token::Aggregate(_) = self.peek() {
            return self.aggregate(negated, None).map(BodyElement::Aggregate);
        }
        let lhs = self.term()?;
        if let Some(op) = self.compare_op() {
            if let Token::Aggregate(_) = self.peek() {
                return self
                    .aggregate(negated, Some((lhs, op)))
                    .map(BodyElement::Aggregate);
            }
            if negated {
                return self.error(&["aggregate"]);
            }
            let rhs = self.term()?;
            return Ok(BodyElement::Literal(Literal::Builtin { lhs, op, rhs }));
        }
        let atom = self.atom_from_term(lhs)?;
        Ok(BodyElement::Literal(Literal::Classical { atom, negated }))
    }

    fn compare_op(&mut self) -> Option<CompareOp> {
        let op = match self.peek() {
            Token::Op("=") => CompareOp::Eq,
            Token::Op("!=") => CompareOp::Ne,
            Token::Op("<") => CompareOp::Lt,
            Token::Op("<=") => CompareOp::Le,
            Token::Op(">") => CompareOp::Gt,
            Token::Op(">=") => CompareOp::Ge,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn aggregate(
        &mut self,
        negated: bool,
        left_guard: Option<(Term, CompareOp)>,
    ) -> Result<AggregateLiteral, ParseError> {
        let function = match self.bump() {
            Token::Aggregate(k) => match k.as_str() {
                "#count" => AggregateFunction::Count,
                "#sum" => AggregateFunction::Sum,
                "#min" => AggregateFunction::Min,
                _ => AggregateFunction::Max,
            },
            _ => unreachable!("caller checked for an aggregate token"),
        };
        self.expect(Token::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != &Token::RBrace {
            loop {
                let mut terms = vec![self.term()?];
                while self.peek() == &Token::Comma {
                    self.bump();
                    terms.push(self.term()?);
                }
                let condition = if self.peek() == &Token::Colon {
                    self.bump();
                    self.literals()?
                } else {
                    Vec::new()
                };
                elements.push(AggregateElement { terms, condition });
                if self.peek() == &Token::Semicolon {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::RBrace)?;
        let right_guard = match self.compare_op() {
            Some(op) => Some((op, self.term()?)),
            None => None,
        };
        if left_guard.is_none() && right_guard.is_none() {
            return self.error(&["aggregate guard"]);
        }
        Ok(AggregateLiteral {
            negated,
            function,
            elements,
            left_guard,
            right_guard,
        })
    }

    /// Comma-separated literals in a choice or aggregate condition.
    fn literals(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut out = vec![self.literal()?];
        while self.peek() == &Token::Comma {
            self.bump();
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if self.peek() == &Token::Not {
            self.bump();
            let atom = self.atom()?;
            return Ok(Literal::neg(atom));
        }
        let lhs = self.term()?;
        if let Some(op) = self.compare_op() {
            let rhs = self.term()?;
            return Ok(Literal::Builtin { lhs, op, rhs });
        }
        Ok(Literal::pos(self.atom_from_term(lhs)?))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        if !matches!(self.peek(), Token::Ident(_)) {
            return self.error(&["atom"]);
        }
        let term = self.term()?;
        self.atom_from_term(term)
    }

    fn atom_from_term(&self, term: Term) -> Result<Atom, ParseError> {
        match term {
            Term::Constant(name) if !name.starts_with('"') => Ok(Atom::prop(name)),
            Term::Function(name, args) => Ok(Atom::new(name, args)),
            other => {
                let (line, col) = self.position();
                Err(ParseError::syntax(
                    line,
                    col,
                    vec!["atom".into(), "comparison operator".into()],
                    format!("term `{other}`"),
                ))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Token::Integer(v) => {
                self.bump();
                Ok(Term::Integer(v))
            }
            Token::Minus => {
                self.bump();
                match self.peek().clone() {
                    Token::Integer(v) => {
                        self.bump();
                        Ok(Term::Integer(-v))
                    }
                    _ => self.error(&["integer"]),
                }
            }
            Token::Variable(v) => {
                self.bump();
                Ok(Term::Variable(v))
            }
            Token::Str(s) => {
                self.bump();
                Ok(Term::Constant(s))
            }
            Token::Ident(name) => {
                self.bump();
                if self.peek() == &Token::LParen {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while self.peek() == &Token::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Token::RParen)?;
                    Ok(Term::Function(name, args))
                } else {
                    Ok(Term::Constant(name))
                }
            }
            _ => self.error(&["term"]),
        }
    }
}
