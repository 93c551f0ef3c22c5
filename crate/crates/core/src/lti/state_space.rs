use std::fmt;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use super::polynomial::Polynomial;
use super::transfer_function::TransferFunction;
use crate::error::{Error, Result};

/// Continuous-time LTI model `x' = A x + B u`, `y = C x + D u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let (m, p) = (b.ncols(), c.nrows());
        if a.ncols() != n {
            return Err(Error::Dimension(format!("A is {}x{}", n, a.ncols())));
        }
        if b.nrows() != n || c.ncols() != n {
            return Err(Error::Dimension(format!(
                "B is {}x{} and C is {}x{} for {n} states",
                b.nrows(),
                m,
                p,
                c.ncols()
            )));
        }
        if m == 0 || p == 0 {
            return Err(Error::Dimension(
                "need at least one input and one output".into(),
            ));
        }
        if d.nrows() != p || d.ncols() != m {
            return Err(Error::Dimension(format!(
                "D is {}x{}, expected {p}x{m}",
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            input_labels: (0..m).map(|i| format!("u{i}")).collect(),
            output_labels: (0..p).map(|i| format!("y{i}")).collect(),
        })
    }

    /// Row-major convenience constructor.
    pub fn from_rows(
        n: usize,
        m: usize,
        p: usize,
        a: &[f64],
        b: &[f64],
        c: &[f64],
        d: &[f64],
    ) -> Result<Self> {
        let check = |name: &str, v: &[f64], len: usize| {
            if v.len() == len {
                Ok(())
            } else {
                Err(Error::Dimension(format!(
                    "{name} has {} entries, expected {len}",
                    v.len()
                )))
            }
        };
        check("A", a, n * n)?;
        check("B", b, n * m)?;
        check("C", c, p * n)?;
        check("D", d, p * m)?;
        Self::new(
            DMatrix::from_row_slice(n, n, a),
            DMatrix::from_row_slice(n, m, b),
            DMatrix::from_row_slice(p, n, c),
            DMatrix::from_row_slice(p, m, d),
        )
    }

    pub fn with_labels<I, O>(mut self, inputs: I, outputs: O) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<String>,
        O: IntoIterator,
        O::Item: Into<String>,
    {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        if inputs.len() != self.n_inputs() || outputs.len() != self.n_outputs() {
            return Err(Error::Dimension("label count does not match model".into()));
        }
        self.input_labels = inputs;
        self.output_labels = outputs;
        Ok(self)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }
    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }
    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn n_outputs(&self) -> usize {
        self.c.nrows()
    }

    fn check_channel(&self, input: usize, output: usize) -> Result<()> {
        if input >= self.n_inputs() {
            return Err(Error::Index {
                kind: "input",
                index: input,
                len: self.n_inputs(),
            });
        }
        if output >= self.n_outputs() {
            return Err(Error::Index {
                kind: "output",
                index: output,
                len: self.n_outputs(),
            });
        }
        Ok(())
    }

    /// Scalar transfer function of one input/output channel.
    ///
    /// Uses `C adj(sI - A) b = det(sI - A + b C) - det(sI - A)` with both
    /// determinants expanded exactly over polynomial entries. Entries that
    /// are exactly zero stay exactly zero, so structural integrators show up
    /// as exact roots at the origin. No cancellation is performed.
    pub fn to_tf(&self, input: usize, output: usize) -> Result<TransferFunction> {
        self.check_channel(input, output)?;
        let n = self.n_states();
        let d = self.d[(output, input)];
        if n == 0 {
            return Ok(TransferFunction::gain(d));
        }
        let char_a = char_poly(&self.a);
        let bc = self.b.column(input) * self.c.row(output);
        let char_closed = char_poly(&(&self.a - bc));
        let num = &(&char_closed - &char_a) + &char_a.scale(d);
        TransferFunction::new(num, char_a)
    }

    /// Direct evaluation of one channel at complex `s` by solving
    /// `(sI - A) x = b`.
    pub fn eval(&self, s: Complex64, input: usize, output: usize) -> Result<Complex64> {
        self.check_channel(input, output)?;
        let n = self.n_states();
        let d = Complex64::new(self.d[(output, input)], 0.0);
        if n == 0 {
            return Ok(d);
        }
        let pencil = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let rhs = DVector::<Complex64>::from_fn(n, |i, _| Complex64::new(self.b[(i, input)], 0.0));
        let x = pencil
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular(s.to_string()))?;
        let y = (0..n).fold(d, |acc, i| acc + x[i] * self.c[(output, i)]);
        Ok(y)
    }

    pub fn freq_response(
        &self,
        input: usize,
        output: usize,
        omega: &[f64],
    ) -> Result<Vec<Complex64>> {
        omega
            .iter()
            .map(|&w| self.eval(Complex64::new(0.0, w), input, output))
            .collect()
    }

    /// Eigenvalues of `A`.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        eigenvalues(&self.a)
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.poles()?.iter().all(|p| p.re < 0.0))
    }

    /// Controllable canonical realization of a proper transfer function.
    pub fn from_tf(tf: &TransferFunction) -> Result<Self> {
        if !tf.is_proper() {
            return Err(Error::Improper {
                num: tf.num().degree(),
                den: tf.den().degree(),
            });
        }
        let den = tf.den().coeffs();
        let n = den.len() - 1;
        let num = tf.num().coeffs();
        let feedthrough = if num.len() == n + 1 { num[n] } else { 0.0 };
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, 1);
        let mut c = DMatrix::zeros(1, n);
        for i in 0..n.saturating_sub(1) {
            a[(i, i + 1)] = 1.0;
        }
        for j in 0..n {
            a[(n - 1, j)] = -den[j];
            c[(0, j)] = num.get(j).copied().unwrap_or(0.0) - feedthrough * den[j];
        }
        if n > 0 {
            b[(n - 1, 0)] = 1.0;
        }
        Self::new(a, b, c, DMatrix::from_element(1, 1, feedthrough))
    }
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::Eigen)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// `det(sI - A)` by Laplace expansion memoized over column subsets.
///
/// Exponential in `n`, which is fine for the handful of states used here.
pub fn char_poly(a: &DMatrix<f64>) -> Polynomial {
    let n = a.nrows();
    assert!(
        n < 20,
        "char_poly expansion is only meant for small matrices"
    );
    let entry = |i: usize, j: usize| -> Vec<f64> {
        if i == j {
            vec![-a[(i, j)], 1.0]
        } else {
            vec![-a[(i, j)]]
        }
    };
    let mut minors: Vec<Vec<f64>> = vec![Vec::new(); 1 << n];
    minors[0] = vec![1.0];
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = vec![0.0; row + 2];
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let e = entry(row, j);
            if e.iter().all(|&x| x == 0.0) {
                continue;
            }
            let idx = (mask & ((1 << j) - 1)).count_ones() as usize;
            let sign = if (row + idx).is_multiple_of(2) { 1.0 } else { -1.0 };
            let minor = &minors[mask ^ (1 << j)];
            for (p, &x) in e.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                for (q, &y) in minor.iter().enumerate() {
                    acc[p + q] += sign * x * y;
                }
            }
        }
        minors[mask] = acc;
    }
    Polynomial::new(minors[(1 << n) - 1].clone())
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let block = |f: &mut fmt::Formatter<'_>, name: &str, m: &DMatrix<f64>| -> fmt::Result {
            writeln!(f, "{name} =")?;
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| format!("{:>16.10}", m[(i, j)]))
                    .collect();
                writeln!(f, "  [{}]", row.join(" "))?;
            }
            Ok(())
        };
        writeln!(
            f,
            "inputs: [{}]  outputs: [{}]",
            self.input_labels.join(", "),
            self.output_labels.join(", ")
        )?;
        block(f, "A", &self.a)?;
        block(f, "B", &self.b)?;
        block(f, "C", &self.c)?;
        block(f, "D", &self.d)
    }
}
