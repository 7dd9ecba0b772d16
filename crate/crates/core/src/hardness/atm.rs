use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::HardnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Universal,
    Existential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'l',
            Side::Right => 'r',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub write: usize,
    pub shift: i8,
}

/// An alternating Turing machine with left and right transition functions.
/// States and symbols are indices into `states` and `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atm {
    pub states: Vec<(String, Kind)>,
    pub alphabet: Vec<String>,
    pub blank: usize,
    pub initial: usize,
    pub delta: BTreeMap<(Side, usize, usize), Transition>,
}

pub const BLANK: &str = "_";

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Atm {
    /// Parses the line-based machine format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Atm, HardnessError> {
        let err = |line: usize, msg: String| HardnessError::Parse { line, msg };
        let mut states: Option<Vec<(String, Kind)>> = None;
        let mut alphabet: Option<Vec<String>> = None;
        let mut initial: Option<(usize, String)> = None;
        let mut rules = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, rest)) = content.split_once(':') else {
                return Err(err(line, format!("expected `key: value`, got {content:?}")));
            };
            let rest = rest.trim();
            match key.trim() {
                "states" => {
                    let mut v = Vec::new();
                    for item in rest.split_whitespace() {
                        let (name, kind) = item.split_once(':').ok_or_else(|| {
                            err(line, format!("state {item:?} lacks `:E` or `:U`"))
                        })?;
                        let kind = match kind {
                            "E" => Kind::Existential,
                            "U" => Kind::Universal,
                            k => return Err(err(line, format!("unknown state kind {k:?}"))),
                        };
                        if !valid_name(name) {
                            return Err(err(
                                line,
                                format!("state name {name:?} must be alphanumeric"),
                            ));
                        }
                        v.push((name.to_string(), kind));
                    }
                    states = Some(v);
                }
                "alphabet" => {
                    let v: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if let Some(s) = v.iter().find(|s| !valid_name(s)) {
                        return Err(err(
                            line,
                            format!("symbol {s:?} must be alphanumeric or `_`"),
                        ));
                    }
                    alphabet = Some(v);
                }
                "initial" => initial = Some((line, rest.to_string())),
                "deltaL" | "deltaR" => {
                    let side = if key.trim() == "deltaL" {
                        Side::Left
                    } else {
                        Side::Right
                    };
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| err(line, "a transition needs `->`".to_string()))?;
                    let l: Vec<&str> = lhs.split_whitespace().collect();
                    let r: Vec<&str> = rhs.split_whitespace().collect();
                    if l.len() != 2 || r.len() != 3 {
                        return Err(err(line, "expected `q s -> p s' d`".into()));
                    }
                    let shift: i8 = match r[2] {
                        "-1" => -1,
                        "0" | "+0" | "-0" => 0,
                        "1" | "+1" => 1,
                        d => return Err(err(line, format!("head shift {d:?} is not -1, 0 or +1"))),
                    };
                    rules.push((
                        line,
                        side,
                        l[0].to_string(),
                        l[1].to_string(),
                        r[0].to_string(),
                        r[1].to_string(),
                        shift,
                    ));
                }
                k => return Err(err(line, format!("unknown key {k:?}"))),
            }
        }
        let states = states.ok_or_else(|| err(0, "missing `states:` line".into()))?;
        let alphabet = alphabet.ok_or_else(|| err(0, "missing `alphabet:` line".into()))?;
        let (iline, iname) = initial.ok_or_else(|| err(0, "missing `initial:` line".into()))?;
        let state = |line: usize, s: &str| {
            states
                .iter()
                .position(|(n, _)| n == s)
                .ok_or_else(|| err(line, format!("unknown state {s:?}")))
        };
        let symbol = |line: usize, s: &str| {
            alphabet
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| err(line, format!("unknown symbol {s:?}")))
        };
        let initial = state(iline, &iname)?;
        let mut delta = BTreeMap::new();
        for (line, side, q, s, p, s2, shift) in rules {
            let key = (side, state(line, &q)?, symbol(line, &s)?);
            let t = Transition {
                next: state(line, &p)?,
                write: symbol(line, &s2)?,
                shift,
            };
            if delta.insert(key, t).is_some() {
                return Err(err(line, format!("duplicate transition for ({q}, {s})")));
            }
        }
        let blank = alphabet.iter().position(|s| s == BLANK).ok_or_else(|| {
            HardnessError::Domain(format!(
                "the alphabet must contain the blank symbol `{BLANK}`"
            ))
        })?;
        let atm = Atm {
            states,
            alphabet,
            blank,
            initial,
            delta,
        };
        atm.check_total()?;
        Ok(atm)
    }

    /// Halting states have no transitions; every other state needs both a
    /// left and a right transition on every symbol.
    fn check_total(&self) -> Result<(), HardnessError> {
        for q in 0..self.states.len() {
            if self.halting(q) {
                continue;
            }
            for side in Side::BOTH {
                for s in 0..self.alphabet.len() {
                    if !self.delta.contains_key(&(side, q, s)) {
                        return Err(HardnessError::Domain(format!(
                            "state {} has transitions but delta{} is undefined on {}",
                            self.states[q].0,
                            if side == Side::Left { 'L' } else { 'R' },
                            self.alphabet[s]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn halting(&self, q: usize) -> bool {
        !self.delta.keys().any(|&(_, p, _)| p == q)
    }

    pub fn accepting(&self, q: usize) -> bool {
        self.states[q].1 == Kind::Universal && self.halting(q)
    }

    pub fn rejecting(&self, q: usize) -> bool {
        self.states[q].1 == Kind::Existential && self.halting(q)
    }

    /// Reads an input word: whitespace-separated symbols, or one symbol per
    /// character when there is no whitespace.
    pub fn parse_input(&self, w: &str) -> Result<Vec<usize>, HardnessError> {
        let items: Vec<String> = if w.trim().contains(char::is_whitespace) {
            w.split_whitespace().map(str::to_string).collect()
        } else {
            w.trim().chars().map(String::from).collect()
        };
        if items.is_empty() {
            return Err(HardnessError::Domain(
                "the input word must be non-empty".into(),
            ));
        }
        items
            .iter()
            .map(|s| {
                self.alphabet.iter().position(|a| a == s).ok_or_else(|| {
                    HardnessError::Domain(format!("input symbol {s:?} is not in the alphabet"))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub state: usize,
    pub tape: Vec<usize>,
    pub head: usize,
}

/// Vertex 0 is the root; each edge is `(parent, child, side)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigTree {
    pub vertices: Vec<Config>,
    pub edges: Vec<(usize, usize, Side)>,
}

impl ConfigTree {
    pub fn to_json(&self, atm: &Atm) -> Value {
        json!({
            "vertices": self.vertices.iter().enumerate().map(|(i, c)| json!({
                "id": i,
                "state": atm.states[c.state].0,
                "head": c.head,
                "tape": c.tape.iter().map(|&s| atm.alphabet[s].as_str()).collect::<Vec<_>>().join(" "),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(u, v, s)| json!({"from": u, "to": v, "side": s.letter().to_string()})).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimOutcome {
    Accept(ConfigTree),
    Reject,
    DepthExhausted,
}

enum Run {
    Accept(Vec<Config>, Vec<(usize, usize, Side)>),
    Reject,
    Exhausted,
}

struct Simulator<'a> {
    atm: &'a Atm,
    max_depth: usize,
}

impl Simulator<'_> {
    fn step(&self, c: &Config, side: Side) -> Result<Config, HardnessError> {
        let t = self.atm.delta[&(side, c.state, c.tape[c.head])];
        let head = c.head as i64 + t.shift as i64;
        if head < 0 || head >= c.tape.len() as i64 {
            return Err(HardnessError::Simulation(format!(
                "the head leaves the tape of {} cells from square {}",
                c.tape.len(),
                c.head
            )));
        }
        let mut tape = c.tape.clone();
        tape[c.head] = t.write;
        Ok(Config {
            state: t.next,
            tape,
            head: head as usize,
        })
    }

    /// The subtree rooted at `c`, with vertex 0 for `c` itself.
    fn run(&self, c: &Config, depth: usize) -> Result<Run, HardnessError> {
        let q = c.state;
        if self.atm.accepting(q) {
            return Ok(Run::Accept(vec![c.clone()], Vec::new()));
        }
        if self.atm.rejecting(q) {
            return Ok(Run::Reject);
        }
        if depth == self.max_depth {
            return Ok(Run::Exhausted);
        }
        let graft = |vs: &mut Vec<Config>,
                     es: &mut Vec<(usize, usize, Side)>,
                     side,
                     sv: Vec<Config>,
                     se: Vec<(usize, usize, Side)>| {
            let off = vs.len();
            es.push((0, off, side));
            es.extend(se.into_iter().map(|(a, b, s)| (a + off, b + off, s)));
            vs.extend(sv);
        };
        let mut vs = vec![c.clone()];
        let mut es = Vec::new();
        match self.atm.states[q].1 {
            Kind::Universal => {
                for side in Side::BOTH {
                    match self.run(&self.step(c, side)?, depth + 1)? {
                        Run::Accept(sv, se) => graft(&mut vs, &mut es, side, sv, se),
                        other => return Ok(other),
                    }
                }
                Ok(Run::Accept(vs, es))
            }
            Kind::Existential => {
                let mut exhausted = false;
                for side in Side::BOTH {
                    match self.run(&self.step(c, side)?, depth + 1)? {
                        Run::Accept(sv, se) => {
                            graft(&mut vs, &mut es, side, sv, se);
                            return Ok(Run::Accept(vs, es));
                        }
                        Run::Exhausted => exhausted = true,
                        Run::Reject => {}
                    }
                }
                Ok(if exhausted {
                    Run::Exhausted
                } else {
                    Run::Reject
                })
            }
        }
    }
}

/// Searches for an accepting configuration tree, trying left successors of
/// existential states first.
pub fn simulate_atm(
    atm: &Atm,
    w: &[usize],
    max_depth: usize,
    tape_cells: usize,
) -> Result<SimOutcome, HardnessError> {
    if w.is_empty() {
        return Err(HardnessError::Domain(
            "the input word must be non-empty".into(),
        ));
    }
    if tape_cells < w.len() {
        return Err(HardnessError::Domain(format!(
            "{} tape cells cannot hold an input of length {}",
            tape_cells,
            w.len()
        )));
    }
    let mut tape = w.to_vec();
    tape.resize(tape_cells, atm.blank);
    let root = Config {
        state: atm.initial,
        tape,
        head: 0,
    };
    Ok(match (Simulator { atm, max_depth }).run(&root, 0)? {
        Run::Accept(vertices, edges) => SimOutcome::Accept(ConfigTree { vertices, edges }),
        Run::Reject => SimOutcome::Reject,
        Run::Exhausted => SimOutcome::DepthExhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WRITER: &str = "
        # writes 1 over the first square, then accepts
        states: w:E acc:U
        alphabet: _ 1
        initial: w
        deltaL: w _ -> acc 1 0
        deltaL: w 1 -> acc 1 +1
        deltaR: w _ -> acc 1 0
        deltaR: w 1 -> acc _ 0
    ";

    #[test]
    fn parse_and_run() {
        let m = Atm::parse(WRITER).unwrap();
        assert_eq!(m.states.len(), 2);
        assert!(m.accepting(1) && !m.halting(0));
        let w = m.parse_input("1").unwrap();
        let SimOutcome::Accept(t) = simulate_atm(&m, &w, 10, 2).unwrap() else {
            panic!("expected acceptance")
        };
        assert_eq!(t.vertices.len(), 2);
        assert_eq!(t.edges, vec![(0, 1, Side::Left)]);
        assert_eq!(t.vertices[1].head, 1);
    }

    #[test]
    fn immediate_acceptance() {
        let m = Atm::parse("states: a:U\nalphabet: _\ninitial: a").unwrap();
        let SimOutcome::Accept(t) = simulate_atm(&m, &[0], 3, 2).unwrap() else {
            panic!("expected acceptance")
        };
        assert_eq!(t.vertices.len(), 1);
    }

    #[test]
    fn rejection_and_errors() {
        let rej = "states: s:E no:E\nalphabet: _ 1\ninitial: s\ndeltaL: s _ -> no _ 0\ndeltaL: s 1 -> no 1 0\ndeltaR: s _ -> no _ 0\ndeltaR: s 1 -> no 1 0";
        let m = Atm::parse(rej).unwrap();
        assert_eq!(simulate_atm(&m, &[1], 5, 2).unwrap(), SimOutcome::Reject);
        let left =
            "states: s:U a:U\nalphabet: _\ninitial: s\ndeltaL: s _ -> a _ -1\ndeltaR: s _ -> a _ 0";
        assert!(matches!(
            simulate_atm(&Atm::parse(left).unwrap(), &[0], 5, 2),
            Err(HardnessError::Simulation(_))
        ));
        assert!(
            Atm::parse("states: s:U a:U\nalphabet: _\ninitial: s\ndeltaL: s _ -> a _ 0").is_err()
        );
        assert!(Atm::parse("states: s:U\nalphabet: 0 1\ninitial: s").is_err());
        let looping =
            "states: s:E\nalphabet: _\ninitial: s\ndeltaL: s _ -> s _ 0\ndeltaR: s _ -> s _ 0";
        assert_eq!(
            simulate_atm(&Atm::parse(looping).unwrap(), &[0], 6, 2).unwrap(),
            SimOutcome::DepthExhausted
        );
    }
}
