//! Finite algebras: a signature plus total operation tables on `0..n-1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{Assignment, Term, Var};

/// An operation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpSym {
    pub name: String,
    pub arity: usize,
}

/// A finite similarity type: named symbols with arities, plus the name of
/// the designated point constant (written `0` in ideal settings, `1` in
/// filter settings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<OpSym>,
    point_name: String,
}

impl Signature {
    pub fn new(symbols: Vec<OpSym>, point_name: impl Into<String>) -> Result<Self> {
        let point_name = point_name.into();
        let mut seen = std::collections::BTreeSet::new();
        for s in &symbols {
            if !seen.insert(s.name.clone()) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        match symbols.iter().find(|s| s.name == point_name) {
            Some(s) if s.arity == 0 => {}
            _ => return Err(Error::BadPoint(point_name)),
        }
        Ok(Signature {
            symbols,
            point_name,
        })
    }

    pub fn symbols(&self) -> &[OpSym] {
        &self.symbols
    }

    pub fn point_name(&self) -> &str {
        &self.point_name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

/// All k-tuples over `0..n-1` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> Tuples {
    Tuples {
        n,
        current: vec![0; k],
        done: n == 0 && k > 0,
        fresh: true,
    }
}

pub struct Tuples {
    n: usize,
    current: Vec<usize>,
    done: bool,
    fresh: bool,
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.current.clone());
        }
        // increment like an odometer, last coordinate fastest
        for i in (0..self.current.len()).rev() {
            self.current[i] += 1;
            if self.current[i] < self.n {
                return Some(self.current.clone());
            }
            self.current[i] = 0;
        }
        self.done = true;
        None
    }
}

/// Row-major index of a tuple into a flat table over `0..n-1`.
pub fn tuple_index(n: usize, args: &[usize]) -> usize {
    let mut idx = 0;
    for &a in args {
        idx = idx * n + a;
    }
    idx
}

/// A finite algebra of some signature. Universe elements are `0..size-1`;
/// every symbol has a total table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
    point_elem: usize,
    /// Residuated/quasi role bindings carried over from the algebra file
    /// (`join`, `meet`, `fuse`, `lres`, `rres`, `one`, `zero`). Empty for
    /// plain pointed algebras.
    bindings: BTreeMap<String, String>,
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::File("universe must be non-empty".into()));
        }
        if tables.len() != signature.symbols().len() {
            return Err(Error::File(format!(
                "expected {} tables, got {}",
                signature.symbols().len(),
                tables.len()
            )));
        }
        for (sym, table) in signature.symbols().iter().zip(&tables) {
            let expected = size.pow(sym.arity as u32);
            if table.len() != expected {
                return Err(Error::BadTableSize {
                    symbol: sym.name.clone(),
                    expected,
                    got: table.len(),
                });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= size) {
                return Err(Error::TableEntryOutOfRange {
                    symbol: sym.name.clone(),
                    value: v,
                    size,
                });
            }
        }
        let point_idx = signature.index_of(signature.point_name()).unwrap();
        let point_elem = tables[point_idx][0];
        Ok(FiniteAlgebra {
            name: name.into(),
            signature,
            size,
            tables,
            point_elem,
            bindings: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// The element named by the designated point constant.
    pub fn point(&self) -> usize {
        self.point_elem
    }

    pub fn bindings(&self) -> &BTreeMap<String, String> {
        &self.bindings
    }

    pub fn set_bindings(&mut self, bindings: BTreeMap<String, String>) {
        self.bindings = bindings;
    }

    /// Same algebra with the designated point rebound to another constant.
    pub fn with_point(&self, symbol: &str) -> Result<FiniteAlgebra> {
        let mut alg = self.clone();
        alg.signature = Signature::new(self.signature.symbols().to_vec(), symbol)?;
        let idx = alg.signature.index_of(symbol).unwrap();
        alg.point_elem = alg.tables[idx][0];
        alg.name = format!("{}@{}", self.name, symbol);
        Ok(alg)
    }

    pub fn op_index(&self, name: &str) -> Result<usize> {
        self.signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.signature.symbols()[idx].arity
    }

    pub fn table(&self, idx: usize) -> &[usize] {
        &self.tables[idx]
    }

    /// Applies operation `idx` to a full argument tuple.
    pub fn apply(&self, idx: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity(idx));
        self.tables[idx][tuple_index(self.size, args)]
    }

    /// Bottom-up term evaluation under a (total) assignment.
    pub fn eval(&self, term: &Term, assignment: &Assignment) -> Result<usize> {
        match term {
            Term::Var(v) => assignment.get(*v).ok_or(Error::UnboundVariable(*v)),
            Term::App(sym, args) => {
                let idx = self.op_index(sym)?;
                if self.arity(idx) != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: sym.clone(),
                        expected: self.arity(idx),
                        got: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, assignment)?);
                }
                Ok(self.tables[idx][tuple_index(self.size, &vals)])
            }
        }
    }

    /// The full value table of `term` over assignments to `vars`, in
    /// lexicographic tuple order. Variables of the term must appear in
    /// `vars`. Symbols and variables are resolved once, so large batches
    /// of terms stay cheap.
    pub fn value_table(&self, term: &Term, vars: &[Var]) -> Result<Vec<usize>> {
        enum Resolved {
            Slot(usize),
            Apply(usize, Vec<Resolved>),
        }
        fn resolve(alg: &FiniteAlgebra, term: &Term, vars: &[Var]) -> Result<Resolved> {
            match term {
                Term::Var(v) => vars
                    .iter()
                    .position(|u| u == v)
                    .map(Resolved::Slot)
                    .ok_or(Error::UnboundVariable(*v)),
                Term::App(sym, args) => {
                    let idx = alg
                        .signature
                        .index_of(sym)
                        .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
                    if alg.arity(idx) != args.len() {
                        return Err(Error::ArityMismatch {
                            symbol: sym.clone(),
                            expected: alg.arity(idx),
                            got: args.len(),
                        });
                    }
                    let children = args
                        .iter()
                        .map(|a| resolve(alg, a, vars))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Resolved::Apply(idx, children))
                }
            }
        }
        fn eval(alg: &FiniteAlgebra, r: &Resolved, tuple: &[usize]) -> usize {
            match r {
                Resolved::Slot(i) => tuple[*i],
                Resolved::Apply(idx, children) => match children.as_slice() {
                    [] => alg.tables[*idx][0],
                    [a] => alg.tables[*idx][eval(alg, a, tuple)],
                    [a, b] => {
                        let va = eval(alg, a, tuple);
                        let vb = eval(alg, b, tuple);
                        alg.tables[*idx][va * alg.size + vb]
                    }
                    _ => {
                        let args: Vec<usize> =
                            children.iter().map(|c| eval(alg, c, tuple)).collect();
                        alg.tables[*idx][tuple_index(alg.size, &args)]
                    }
                },
            }
        }
        let resolved = resolve(self, term, vars)?;
        let k = vars.len();
        let total = self.size.pow(k as u32);
        let mut out = Vec::with_capacity(total);
        let mut tuple = vec![0usize; k];
        for _ in 0..total {
            out.push(eval(self, &resolved, &tuple));
            for i in (0..k).rev() {
                tuple[i] += 1;
                if tuple[i] < self.size {
                    break;
                }
                tuple[i] = 0;
            }
        }
        Ok(out)
    }

    /// Quotient by a compatible partition, plus the canonical surjection.
    /// Quotient elements are numbered by increasing least block member.
    pub fn quotient(&self, theta: &crate::congruence::Congruence) -> Result<Quotient> {
        if theta.universe_size() != self.size || !theta.is_compatible(self) {
            return Err(Error::IncompatiblePartition);
        }
        let reps = theta.representatives();
        let mut rep_to_new = BTreeMap::new();
        for (new, &rep) in reps.iter().enumerate() {
            rep_to_new.insert(rep, new);
        }
        let map: Vec<usize> = (0..self.size)
            .map(|e| rep_to_new[&theta.block_of(e)])
            .collect();
        let new_size = reps.len();
        let mut tables = Vec::with_capacity(self.tables.len());
        for (idx, sym) in self.signature.symbols().iter().enumerate() {
            let mut table = Vec::with_capacity(new_size.pow(sym.arity as u32));
            for tuple in tuples(new_size, sym.arity) {
                let lifted: Vec<usize> = tuple.iter().map(|&c| reps[c]).collect();
                table.push(map[self.apply(idx, &lifted)]);
            }
            tables.push(table);
        }
        let algebra = FiniteAlgebra::new(
            format!("{}/θ", self.name),
            self.signature.clone(),
            new_size,
            tables,
        )?;
        Ok(Quotient { algebra, map })
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn nest(table: &[usize], size: usize, arity: usize) -> serde_json::Value {
            if arity == 0 {
                return serde_json::json!(table[0]);
            }
            let chunk = table.len() / size;
            let rows: Vec<serde_json::Value> = (0..size)
                .map(|i| nest(&table[i * chunk..(i + 1) * chunk], size, arity - 1))
                .collect();
            serde_json::Value::Array(rows)
        }
        let operations: Vec<serde_json::Value> = self
            .signature
            .symbols()
            .iter()
            .zip(&self.tables)
            .map(|(sym, table)| {
                serde_json::json!({
                    "symbol": sym.name,
                    "arity": sym.arity,
                    "table": nest(table, self.size, sym.arity),
                })
            })
            .collect();
        let mut obj = serde_json::json!({
            "name": self.name,
            "size": self.size,
            "point": self.signature.point_name(),
            "operations": operations,
        });
        if !self.bindings.is_empty() {
            obj["bindings"] = serde_json::json!(self.bindings);
        }
        obj
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {})", self.name, self.size)
    }
}

/// Quotient algebra together with the canonical surjection `map[e]`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: FiniteAlgebra,
    pub map: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OpFile {
    symbol: String,
    arity: usize,
    table: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    size: usize,
    point: String,
    operations: Vec<OpFile>,
    #[serde(default)]
    bindings: BTreeMap<String, String>,
}

fn flatten_table(
    symbol: &str,
    value: &serde_json::Value,
    size: usize,
    arity: usize,
    out: &mut Vec<usize>,
) -> Result<()> {
    if arity == 0 {
        let v = value
            .as_u64()
            .ok_or_else(|| Error::File(format!("table of `{}`: expected an integer", symbol)))?;
        out.push(v as usize);
        return Ok(());
    }
    let arr = value
        .as_array()
        .ok_or_else(|| Error::File(format!("table of `{}`: expected a nested array", symbol)))?;
    if arr.len() != size {
        return Err(Error::File(format!(
            "table of `{}`: expected {} rows, got {}",
            symbol,
            size,
            arr.len()
        )));
    }
    for row in arr {
        flatten_table(symbol, row, size, arity - 1, out)?;
    }
    Ok(())
}

/// Parses the JSON algebra format.
pub fn algebra_from_json(text: &str) -> Result<FiniteAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::File(e.to_string()))?;
    let symbols: Vec<OpSym> = file
        .operations
        .iter()
        .map(|op| OpSym {
            name: op.symbol.clone(),
            arity: op.arity,
        })
        .collect();
    let signature = Signature::new(symbols, file.point)?;
    let mut tables = Vec::with_capacity(file.operations.len());
    for op in &file.operations {
        let mut flat = Vec::new();
        flatten_table(&op.symbol, &op.table, file.size, op.arity, &mut flat)?;
        tables.push(flat);
    }
    let mut alg = FiniteAlgebra::new(file.name, signature, file.size, tables)?;
    alg.set_bindings(file.bindings);
    Ok(alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn eval_lukasiewicz_implication() {
        let l3 = corpus::l3();
        let t: Term = "->(x1,y1)".parse().unwrap();
        let a = Assignment::new().bind(Var::X(1), 2).bind(Var::Y(1), 1);
        assert_eq!(l3.eval(&t, &a).unwrap(), 1);
    }

    #[test]
    fn eval_variable_is_identity() {
        let g3 = corpus::g3();
        for e in g3.elements() {
            let a = Assignment::new().bind(Var::X(1), e);
            assert_eq!(g3.eval(&Term::var(Var::X(1)), &a).unwrap(), e);
        }
    }

    #[test]
    fn eval_goedel_double_negation() {
        let g3 = corpus::g3();
        let t: Term = "->(->(x1,0),0)".parse().unwrap();
        let a = Assignment::new().bind(Var::X(1), 1);
        assert_eq!(g3.eval(&t, &a).unwrap(), 2);
    }

    #[test]
    fn eval_errors() {
        let g3 = corpus::g3();
        let unbound: Term = "->(x1,y1)".parse().unwrap();
        let a = Assignment::new().bind(Var::X(1), 0);
        assert_eq!(
            g3.eval(&unbound, &a),
            Err(Error::UnboundVariable(Var::Y(1)))
        );
        let unknown: Term = "f(x1)".parse().unwrap();
        let a = Assignment::new().bind(Var::X(1), 0);
        assert!(matches!(
            g3.eval(&unknown, &a),
            Err(Error::UnknownSymbol(_))
        ));
        let bad_arity: Term = "->(x1)".parse().unwrap();
        assert!(matches!(
            g3.eval(&bad_arity, &a),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn rejects_out_of_range_table() {
        let sig = Signature::new(
            vec![
                OpSym {
                    name: "f".into(),
                    arity: 1,
                },
                OpSym {
                    name: "0".into(),
                    arity: 0,
                },
            ],
            "0",
        )
        .unwrap();
        let err = FiniteAlgebra::new("bad", sig, 2, vec![vec![0, 5], vec![0]]);
        assert!(matches!(err, Err(Error::TableEntryOutOfRange { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let g3 = corpus::g3();
        let text = serde_json::to_string(&g3.to_json()).unwrap();
        let back = algebra_from_json(&text).unwrap();
        assert_eq!(back, g3);
    }

    #[test]
    fn signature_rejects_duplicates_and_bad_points() {
        let dup = Signature::new(
            vec![
                OpSym {
                    name: "f".into(),
                    arity: 1,
                },
                OpSym {
                    name: "f".into(),
                    arity: 2,
                },
                OpSym {
                    name: "0".into(),
                    arity: 0,
                },
            ],
            "0",
        );
        assert!(matches!(dup, Err(Error::DuplicateSymbol(_))));
        let bad = Signature::new(
            vec![OpSym {
                name: "f".into(),
                arity: 1,
            }],
            "f",
        );
        assert!(matches!(bad, Err(Error::BadPoint(_))));
    }

    #[test]
    fn point_rebinding() {
        let l3 = corpus::l3();
        assert_eq!(l3.point(), 2);
        let at_zero = l3.with_point("0").unwrap();
        assert_eq!(at_zero.point(), 0);
        assert!(l3.with_point("v").is_err());
    }
}
