//! Reverse-mode automatic differentiation over [`Tensor`] values.
//!
//! A [`Tape`] records each operation as it executes. Because a node can only
//! consume nodes pushed before it, the node list is already in topological
//! order and [`Tape::backward`] is a single reverse sweep.
//!
//! Parameters are borrowed for the lifetime of the tape, so building a graph
//! over large weight matrices copies nothing.

use std::borrow::Cow;

use super::{NumericsError, Tensor};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddBias(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Sigmoid(Var),
    Tanh(Var),
    Concat(Vec<Var>),
    Slice { x: Var, start: usize },
    Gather { table: Var, rows: Vec<usize> },
    Reshape(Var),
    Conv1d { seq: Var, filters: Var, bias: Var },
    MaxOverTime { x: Var, argmax: Vec<usize> },
    LogSoftmax(Var),
    Nll { log_probs: Var, target: usize },
    Sum(Var),
    AddN(Vec<Var>),
}

struct Node<'a> {
    value: Cow<'a, Tensor>,
    op: Op,
    requires_grad: bool,
}

#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
}

/// Gradients produced by [`Tape::backward`], indexed by [`Var`].
///
/// Only leaves keep their gradient; interior buffers are released during
/// the sweep.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
    visited: usize,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor> {
        self.grads.get_mut(v.0).and_then(Option::take)
    }

    /// Number of non-leaf operations whose backward rule ran.
    pub fn ops_visited(&self) -> usize {
        self.visited
    }
}

fn shape_err<T>(msg: String) -> Result<T, NumericsError> {
    Err(NumericsError::Shape(msg))
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Records a borrowed trainable parameter.
    pub fn param(&mut self, t: &'a Tensor) -> Var {
        self.push_leaf(Cow::Borrowed(t), true)
    }

    /// Records an owned leaf.
    pub fn leaf(&mut self, t: Tensor, requires_grad: bool) -> Var {
        self.push_leaf(Cow::Owned(t), requires_grad)
    }

    pub fn constant(&mut self, t: Tensor) -> Var {
        self.leaf(t, false)
    }

    fn push_leaf(&mut self, value: Cow<'a, Tensor>, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op: Op::Leaf,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn push(&mut self, value: Tensor, op: Op, inputs: &[Var]) -> Result<Var, NumericsError> {
        #[cfg(debug_assertions)]
        if !value.is_finite() {
            return Err(NumericsError::NonFinite(op_name(&op)));
        }
        let requires_grad = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node {
            value: Cow::Owned(value),
            op,
            requires_grad,
        });
        Ok(Var(self.nodes.len() - 1))
    }

    /// Matrix product. A 1-D left operand is treated as a single row and the
    /// result is 1-D.
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        let (av, bv) = (self.value(a), self.value(b));
        let (m, k, vector) = match av.shape() {
            [k] => (1, *k, true),
            [m, k] => (*m, *k, false),
            s => return shape_err(format!("matmul lhs must be 1-D or 2-D, got {s:?}")),
        };
        let n = match bv.shape() {
            [bk, n] if *bk == k => *n,
            s => {
                return shape_err(format!(
                    "matmul shapes {:?} x {:?} do not align",
                    av.shape(),
                    s
                ))
            }
        };
        let (ad, bd) = (av.data(), bv.data());
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let x = ad[i * k + p];
                if x == 0.0 {
                    continue;
                }
                for (o, w) in row.iter_mut().zip(&bd[p * n..(p + 1) * n]) {
                    *o += x * w;
                }
            }
        }
        let shape: &[usize] = if vector { &[n] } else { &[m, n] };
        let t = Tensor::new(shape, out)?;
        self.push(t, Op::MatMul(a, b), &[a, b])
    }

    fn same_shape(&self, a: Var, b: Var, what: &str) -> Result<(), NumericsError> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return shape_err(format!("{what}: shapes {sa:?} and {sb:?} differ"));
        }
        Ok(())
    }

    fn zip_with(&mut self, a: Var, b: Var, op: Op, f: impl Fn(f64, f64) -> f64) -> Result<Var, NumericsError> {
        self.same_shape(a, b, op_name(&op))?;
        let (av, bv) = (self.value(a), self.value(b));
        let data = av.data().iter().zip(bv.data()).map(|(x, y)| f(*x, *y)).collect();
        let t = Tensor::new(av.shape(), data)?;
        self.push(t, op, &[a, b])
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        self.zip_with(a, b, Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        self.zip_with(a, b, Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        self.zip_with(a, b, Op::Mul(a, b), |x, y| x * y)
    }

    /// Adds a 1-D bias along the last axis of `x`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var, NumericsError> {
        let (xv, bv) = (self.value(x), self.value(bias));
        let n = xv.cols();
        if bv.shape() != [n] {
            return shape_err(format!(
                "bias {:?} does not match last axis of {:?}",
                bv.shape(),
                xv.shape()
            ));
        }
        let mut data = xv.data().to_vec();
        for chunk in data.chunks_mut(n) {
            for (o, b) in chunk.iter_mut().zip(bv.data()) {
                *o += b;
            }
        }
        let t = Tensor::new(xv.shape(), data)?;
        self.push(t, Op::AddBias(x, bias), &[x, bias])
    }

    fn map(&mut self, x: Var, op: Op, f: impl Fn(f64) -> f64) -> Result<Var, NumericsError> {
        let xv = self.value(x);
        let t = Tensor::new(xv.shape(), xv.data().iter().map(|v| f(*v)).collect())?;
        self.push(t, op, &[x])
    }

    pub fn sigmoid(&mut self, x: Var) -> Result<Var, NumericsError> {
        self.map(x, Op::Sigmoid(x), sigmoid)
    }

    pub fn tanh(&mut self, x: Var) -> Result<Var, NumericsError> {
        self.map(x, Op::Tanh(x), f64::tanh)
    }

    /// Concatenates along the last axis; all parts must agree on the
    /// leading axes.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var, NumericsError> {
        let Some(&first) = parts.first() else {
            return shape_err("concat of zero parts".to_string());
        };
        let lead = self.value(first).shape()[..self.value(first).shape().len() - 1].to_vec();
        let rows: usize = lead.iter().product();
        let mut width = 0;
        for &p in parts {
            let s = self.value(p).shape();
            if s[..s.len() - 1] != lead[..] {
                return shape_err(format!("concat: leading axes {:?} vs {:?}", s, lead));
            }
            width += s[s.len() - 1];
        }
        let mut data = Vec::with_capacity(rows * width);
        for r in 0..rows {
            for &p in parts {
                let v = self.value(p);
                let c = v.cols();
                data.extend_from_slice(&v.data()[r * c..(r + 1) * c]);
            }
        }
        let mut shape = lead;
        shape.push(width);
        let t = Tensor::new(&shape, data)?;
        self.push(t, Op::Concat(parts.to_vec()), parts)
    }

    /// Contiguous slice `[start, start + len)` of a 1-D tensor.
    pub fn slice(&mut self, x: Var, start: usize, len: usize) -> Result<Var, NumericsError> {
        let xv = self.value(x);
        if xv.shape().len() != 1 || start + len > xv.len() || len == 0 {
            return shape_err(format!(
                "slice [{start}, {}) of {:?}",
                start + len,
                xv.shape()
            ));
        }
        let t = Tensor::vector(xv.data()[start..start + len].to_vec());
        self.push(t, Op::Slice { x, start }, &[x])
    }

    /// Row lookup: `table[V, d]` → `[rows.len(), d]`.
    pub fn gather(&mut self, table: Var, rows: &[usize]) -> Result<Var, NumericsError> {
        let tv = self.value(table);
        if tv.shape().len() != 2 || rows.is_empty() {
            return shape_err(format!("gather from {:?}", tv.shape()));
        }
        let mut data = Vec::with_capacity(rows.len() * tv.cols());
        for &r in rows {
            if r >= tv.rows() {
                return Err(NumericsError::Index {
                    index: r,
                    len: tv.rows(),
                });
            }
            data.extend_from_slice(tv.row(r));
        }
        let t = Tensor::new(&[rows.len(), tv.cols()], data)?;
        self.push(
            t,
            Op::Gather {
                table,
                rows: rows.to_vec(),
            },
            &[table],
        )
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var, NumericsError> {
        let t = self.value(x).clone().reshaped(shape)?;
        self.push(t, Op::Reshape(x), &[x])
    }

    /// Valid (unpadded) 1-D convolution over time.
    ///
    /// `seq[L, d]`, `filters[w, d, f]`, `bias[f]` → `[L - w + 1, f]` with
    /// `out[t, j] = Σ_{i, c} seq[t + i, c] · filters[i, c, j] + bias[j]`.
    pub fn conv1d(&mut self, seq: Var, filters: Var, bias: Var) -> Result<Var, NumericsError> {
        let (sv, fv, bv) = (self.value(seq), self.value(filters), self.value(bias));
        let (len, d) = match sv.shape() {
            [l, d] => (*l, *d),
            s => return shape_err(format!("conv1d sequence must be 2-D, got {s:?}")),
        };
        let (w, f) = match fv.shape() {
            [w, fd, f] if *fd == d => (*w, *f),
            s => return shape_err(format!("conv1d filters {s:?} do not match input width {d}")),
        };
        if bv.shape() != [f] {
            return shape_err(format!("conv1d bias {:?} for {f} filters", bv.shape()));
        }
        if len < w {
            return shape_err(format!("conv1d sequence length {len} shorter than width {w}"));
        }
        let steps = len - w + 1;
        let (sd, fd, bd) = (sv.data(), fv.data(), bv.data());
        let mut out = Vec::with_capacity(steps * f);
        for _ in 0..steps {
            out.extend_from_slice(bd);
        }
        for t in 0..steps {
            let row = &mut out[t * f..(t + 1) * f];
            for i in 0..w {
                for c in 0..d {
                    let x = sd[(t + i) * d + c];
                    let base = (i * d + c) * f;
                    for (o, k) in row.iter_mut().zip(&fd[base..base + f]) {
                        *o += x * k;
                    }
                }
            }
        }
        let t = Tensor::new(&[steps, f], out)?;
        self.push(t, Op::Conv1d { seq, filters, bias }, &[seq, filters, bias])
    }

    /// Column-wise maximum over the time axis of `x[T, f]`. Ties resolve to
    /// the earliest row.
    pub fn max_over_time(&mut self, x: Var) -> Result<Var, NumericsError> {
        let xv = self.value(x);
        let (rows, cols) = match xv.shape() {
            [r, c] => (*r, *c),
            s => return shape_err(format!("max_over_time expects [T, f], got {s:?}")),
        };
        let mut argmax = vec![0usize; cols];
        let mut best = xv.row(0).to_vec();
        for t in 1..rows {
            for (j, v) in xv.row(t).iter().enumerate() {
                if *v > best[j] {
                    best[j] = *v;
                    argmax[j] = t;
                }
            }
        }
        self.push(Tensor::vector(best), Op::MaxOverTime { x, argmax }, &[x])
    }

    /// Max-shifted log-softmax of a 1-D tensor.
    pub fn log_softmax(&mut self, x: Var) -> Result<Var, NumericsError> {
        let xv = self.value(x);
        if xv.shape().len() != 1 {
            return shape_err(format!("log_softmax expects 1-D, got {:?}", xv.shape()));
        }
        let t = Tensor::vector(log_softmax(xv.data()));
        self.push(t, Op::LogSoftmax(x), &[x])
    }

    /// Negative log-likelihood `-log_probs[target]` as a scalar.
    pub fn nll(&mut self, log_probs: Var, target: usize) -> Result<Var, NumericsError> {
        let lv = self.value(log_probs);
        if lv.shape().len() != 1 {
            return shape_err(format!("nll expects 1-D log-probs, got {:?}", lv.shape()));
        }
        if target >= lv.len() {
            return Err(NumericsError::Index {
                index: target,
                len: lv.len(),
            });
        }
        let t = Tensor::scalar(-lv.data()[target]);
        self.push(t, Op::Nll { log_probs, target }, &[log_probs])
    }

    pub fn sum(&mut self, x: Var) -> Result<Var, NumericsError> {
        let s = self.value(x).data().iter().sum();
        self.push(Tensor::scalar(s), Op::Sum(x), &[x])
    }

    /// Elementwise sum of equally shaped tensors.
    pub fn add_n(&mut self, parts: &[Var]) -> Result<Var, NumericsError> {
        let Some(&first) = parts.first() else {
            return shape_err("add_n of zero parts".to_string());
        };
        let mut acc = self.value(first).clone();
        for &p in &parts[1..] {
            self.same_shape(first, p, "add_n")?;
            acc.add_scaled(self.value(p), 1.0);
        }
        self.push(acc, Op::AddN(parts.to_vec()), parts)
    }

    /// Backpropagates from a scalar `loss`.
    pub fn backward(&self, loss: Var) -> Result<Gradients, NumericsError> {
        let lv = self.value(loss);
        if lv.len() != 1 {
            return shape_err(format!("backward needs a scalar loss, got {:?}", lv.shape()));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        let mut visited = 0;
        if !self.nodes[loss.0].requires_grad {
            return Ok(Gradients { grads, visited });
        }
        grads[loss.0] = Some(Tensor::full(lv.shape(), 1.0));

        for i in (0..=loss.0).rev() {
            let node = &self.nodes[i];
            if matches!(node.op, Op::Leaf) || !node.requires_grad {
                continue;
            }
            let Some(g) = grads[i].take() else { continue };
            visited += 1;
            self.backward_op(&node.op, &node.value, &g, &mut grads);
        }
        Ok(Gradients { grads, visited })
    }

    /// Gradient buffer for `v`, or `None` when `v` does not need one.
    fn buf<'g>(&self, grads: &'g mut [Option<Tensor>], v: Var) -> Option<&'g mut Tensor> {
        let node = &self.nodes[v.0];
        if !node.requires_grad {
            return None;
        }
        Some(grads[v.0].get_or_insert_with(|| Tensor::zeros(node.value.shape())))
    }

    fn backward_op(&self, op: &Op, out: &Tensor, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let gd = g.data();
        match op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                let (k, n) = (bv.rows(), bv.cols());
                let m = av.len() / k;
                if let Some(da) = self.buf(grads, *a) {
                    let dd = da.data_mut();
                    for i in 0..m {
                        let grow = &gd[i * n..(i + 1) * n];
                        for p in 0..k {
                            let brow = &bv.data()[p * n..(p + 1) * n];
                            dd[i * k + p] += grow.iter().zip(brow).map(|(x, y)| x * y).sum::<f64>();
                        }
                    }
                }
                if let Some(db) = self.buf(grads, *b) {
                    let dd = db.data_mut();
                    for i in 0..m {
                        let grow = &gd[i * n..(i + 1) * n];
                        for p in 0..k {
                            let x = av.data()[i * k + p];
                            if x == 0.0 {
                                continue;
                            }
                            for (o, gv) in dd[p * n..(p + 1) * n].iter_mut().zip(grow) {
                                *o += x * gv;
                            }
                        }
                    }
                }
            }
            Op::Add(a, b) | Op::Sub(a, b) => {
                let sign = if matches!(op, Op::Sub(..)) { -1.0 } else { 1.0 };
                if let Some(da) = self.buf(grads, *a) {
                    da.add_scaled(g, 1.0);
                }
                if let Some(db) = self.buf(grads, *b) {
                    db.add_scaled(g, sign);
                }
            }
            Op::AddBias(x, bias) => {
                if let Some(dx) = self.buf(grads, *x) {
                    dx.add_scaled(g, 1.0);
                }
                if let Some(db) = self.buf(grads, *bias) {
                    let n = db.len();
                    for chunk in gd.chunks(n) {
                        for (o, v) in db.data_mut().iter_mut().zip(chunk) {
                            *o += v;
                        }
                    }
                }
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                if let Some(da) = self.buf(grads, *a) {
                    for ((o, gv), y) in da.data_mut().iter_mut().zip(gd).zip(bv.data()) {
                        *o += gv * y;
                    }
                }
                if let Some(db) = self.buf(grads, *b) {
                    for ((o, gv), x) in db.data_mut().iter_mut().zip(gd).zip(av.data()) {
                        *o += gv * x;
                    }
                }
            }
            Op::Sigmoid(x) => {
                if let Some(dx) = self.buf(grads, *x) {
                    for ((o, gv), y) in dx.data_mut().iter_mut().zip(gd).zip(out.data()) {
                        *o += gv * y * (1.0 - y);
                    }
                }
            }
            Op::Tanh(x) => {
                if let Some(dx) = self.buf(grads, *x) {
                    for ((o, gv), y) in dx.data_mut().iter_mut().zip(gd).zip(out.data()) {
                        *o += gv * (1.0 - y * y);
                    }
                }
            }
            Op::Concat(parts) => {
                let width = out.cols();
                let rows = out.len() / width;
                let mut offset = 0;
                for p in parts {
                    let c = self.value(*p).cols();
                    if let Some(dp) = self.buf(grads, *p) {
                        let dd = dp.data_mut();
                        for r in 0..rows {
                            let src = &gd[r * width + offset..r * width + offset + c];
                            for (o, v) in dd[r * c..(r + 1) * c].iter_mut().zip(src) {
                                *o += v;
                            }
                        }
                    }
                    offset += c;
                }
            }
            Op::Slice { x, start } => {
                if let Some(dx) = self.buf(grads, *x) {
                    for (o, v) in dx.data_mut()[*start..*start + gd.len()].iter_mut().zip(gd) {
                        *o += v;
                    }
                }
            }
            Op::Gather { table, rows } => {
                if let Some(dt) = self.buf(grads, *table) {
                    let d = dt.cols();
                    let dd = dt.data_mut();
                    for (r, &row) in rows.iter().enumerate() {
                        for (o, v) in dd[row * d..(row + 1) * d].iter_mut().zip(&gd[r * d..(r + 1) * d]) {
                            *o += v;
                        }
                    }
                }
            }
            Op::Reshape(x) => {
                if let Some(dx) = self.buf(grads, *x) {
                    for (o, v) in dx.data_mut().iter_mut().zip(gd) {
                        *o += v;
                    }
                }
            }
            Op::Conv1d { seq, filters, bias } => {
                let (sv, fv) = (self.value(*seq), self.value(*filters));
                let d = sv.cols();
                let (w, f) = (fv.shape()[0], fv.shape()[2]);
                let steps = out.rows();
                if let Some(ds) = self.buf(grads, *seq) {
                    let dd = ds.data_mut();
                    for t in 0..steps {
                        let grow = &gd[t * f..(t + 1) * f];
                        for i in 0..w {
                            for c in 0..d {
                                let base = (i * d + c) * f;
                                dd[(t + i) * d + c] += grow
                                    .iter()
                                    .zip(&fv.data()[base..base + f])
                                    .map(|(x, y)| x * y)
                                    .sum::<f64>();
                            }
                        }
                    }
                }
                if let Some(df) = self.buf(grads, *filters) {
                    let dd = df.data_mut();
                    for t in 0..steps {
                        let grow = &gd[t * f..(t + 1) * f];
                        for i in 0..w {
                            for c in 0..d {
                                let x = sv.data()[(t + i) * d + c];
                                let base = (i * d + c) * f;
                                for (o, gv) in dd[base..base + f].iter_mut().zip(grow) {
                                    *o += x * gv;
                                }
                            }
                        }
                    }
                }
                if let Some(db) = self.buf(grads, *bias) {
                    for chunk in gd.chunks(f) {
                        for (o, v) in db.data_mut().iter_mut().zip(chunk) {
                            *o += v;
                        }
                    }
                }
            }
            Op::MaxOverTime { x, argmax } => {
                if let Some(dx) = self.buf(grads, *x) {
                    let cols = argmax.len();
                    let dd = dx.data_mut();
                    for (j, &t) in argmax.iter().enumerate() {
                        dd[t * cols + j] += gd[j];
                    }
                }
            }
            Op::LogSoftmax(x) => {
                if let Some(dx) = self.buf(grads, *x) {
                    let total: f64 = gd.iter().sum();
                    for ((o, gv), y) in dx.data_mut().iter_mut().zip(gd).zip(out.data()) {
                        *o += gv - y.exp() * total;
                    }
                }
            }
            Op::Nll { log_probs, target } => {
                if let Some(dl) = self.buf(grads, *log_probs) {
                    dl.data_mut()[*target] -= gd[0];
                }
            }
            Op::Sum(x) => {
                if let Some(dx) = self.buf(grads, *x) {
                    dx.data_mut().iter_mut().for_each(|o| *o += gd[0]);
                }
            }
            Op::AddN(parts) => {
                for p in parts {
                    if let Some(dp) = self.buf(grads, *p) {
                        dp.add_scaled(g, 1.0);
                    }
                }
            }
        }
    }
}

fn op_name(op: &Op) -> &'static str {
    match op {
        Op::Leaf => "leaf",
        Op::MatMul(..) => "matmul",
        Op::Add(..) => "add",
        Op::AddBias(..) => "add_bias",
        Op::Sub(..) => "sub",
        Op::Mul(..) => "mul",
        Op::Sigmoid(..) => "sigmoid",
        Op::Tanh(..) => "tanh",
        Op::Concat(..) => "concat",
        Op::Slice { .. } => "slice",
        Op::Gather { .. } => "gather",
        Op::Reshape(..) => "reshape",
        Op::Conv1d { .. } => "conv1d",
        Op::MaxOverTime { .. } => "max_over_time",
        Op::LogSoftmax(..) => "log_softmax",
        Op::Nll { .. } => "nll",
        Op::Sum(..) => "sum",
        Op::AddN(..) => "add_n",
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable log-softmax of a slice.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|v| (v - max).exp()).sum();
    let log_z = max + sum.ln();
    logits.iter().map(|v| v - log_z).collect()
}
