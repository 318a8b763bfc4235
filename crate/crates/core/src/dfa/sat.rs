//! Incremental SAT backend behind a small trait.

use batsat::{lbool, BasicSolver, Lit, SolverInterface, SolverOpts, Var};

use crate::dfa::encode::Cnf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
}

pub trait SatSolver {
    /// Makes variables `1..=n` available.
    fn reserve_vars(&mut self, n: u32);

    fn add_clause(&mut self, clause: &[i32]);

    fn solve(&mut self, assumptions: &[i32]) -> SatResult;

    /// Value of `var` in the last model.
    fn value(&self, var: i32) -> bool;

    /// Whether assumption `lit` belongs to the final conflict of the last
    /// unsatisfiable call.
    fn in_core(&self, lit: i32) -> bool;

    fn add_cnf(&mut self, cnf: &Cnf) {
        self.reserve_vars(cnf.num_vars);
        for c in &cnf.clauses {
            self.add_clause(c);
        }
    }
}

pub struct Batsat {
    solver: BasicSolver,
    vars: Vec<Var>,
    scratch: Vec<Lit>,
}

impl Batsat {
    /// A solver with randomized polarity and initial activity, so that
    /// different seeds tend to reach different models.
    pub fn new(seed: u64) -> Self {
        let opts = SolverOpts {
            random_seed: 1.0 + (seed % 2_147_483_000) as f64,
            rnd_pol: true,
            rnd_init_act: true,
            random_var_freq: 0.02,
            ..SolverOpts::default()
        };
        Batsat {
            solver: BasicSolver::new(opts, Default::default()),
            vars: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn lit(&self, l: i32) -> Lit {
        let v = self.vars[l.unsigned_abs() as usize - 1];
        Lit::new(v, l > 0)
    }
}

impl SatSolver for Batsat {
    fn reserve_vars(&mut self, n: u32) {
        while (self.vars.len() as u32) < n {
            let v = self.solver.new_var_default();
            self.vars.push(v);
        }
    }

    fn add_clause(&mut self, clause: &[i32]) {
        let max = clause.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0);
        self.reserve_vars(max);
        self.scratch.clear();
        for &l in clause {
            let lit = self.lit(l);
            self.scratch.push(lit);
        }
        self.solver.add_clause_reuse(&mut self.scratch);
    }

    fn solve(&mut self, assumptions: &[i32]) -> SatResult {
        let lits: Vec<Lit> = assumptions.iter().map(|&l| self.lit(l)).collect();
        let r = self.solver.solve_limited(&lits);
        if r == lbool::TRUE {
            SatResult::Sat
        } else {
            SatResult::Unsat
        }
    }

    fn value(&self, var: i32) -> bool {
        self.solver.value_var(self.vars[var as usize - 1]) == lbool::TRUE
    }

    fn in_core(&self, lit: i32) -> bool {
        self.solver
            .unsat_core_contains_var(self.vars[lit.unsigned_abs() as usize - 1])
    }
}
