use std::collections::HashSet;
use std::fmt;

use crate::error::ModelError;

/// A letter of the product alphabet: one input and one output, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub input: usize,
    pub output: usize,
}

impl Letter {
    pub fn new(input: usize, output: usize) -> Self {
        Letter { input, output }
    }
}

/// Input letters (branching directions) and output letters (labels).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(inputs: impl IntoIterator<Item = S>, outputs: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let inputs: Vec<String> = inputs.into_iter().map(Into::into).collect();
        let outputs: Vec<String> = outputs.into_iter().map(Into::into).collect();
        if inputs.is_empty() {
            return Err(ModelError::EmptyAlphabet("input"));
        }
        if outputs.is_empty() {
            return Err(ModelError::EmptyAlphabet("output"));
        }
        let mut seen = HashSet::new();
        for name in inputs.iter().chain(&outputs) {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        Ok(Alphabet { inputs, outputs })
    }

    /// Alphabet with inputs `x0..` and outputs `y0..`.
    pub fn numbered(inputs: usize, outputs: usize) -> Self {
        Alphabet::new((0..inputs).map(|i| format!("x{i}")), (0..outputs).map(|o| format!("y{o}")))
            .expect("numbered alphabet needs at least one input and one output")
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_letters(&self) -> usize {
        self.inputs.len() * self.outputs.len()
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|n| n == name)
    }

    /// Dense index of a letter, input-major.
    pub fn letter_index(&self, l: Letter) -> usize {
        l.input * self.outputs.len() + l.output
    }

    pub fn letter_at(&self, index: usize) -> Letter {
        Letter::new(index / self.outputs.len(), index % self.outputs.len())
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.input < self.inputs.len() && l.output < self.outputs.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.num_letters()).map(|i| self.letter_at(i))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        format!("({},{})", self.inputs[l.input], self.outputs[l.output])
    }

    /// Parses `(input,output)`.
    pub fn parse_letter(&self, text: &str) -> Option<Letter> {
        let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
        let (i, o) = inner.split_once(',')?;
        Some(Letter::new(self.input_index(i.trim())?, self.output_index(o.trim())?))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "inputs: {}", self.inputs.join(" "))?;
        write!(f, "; outputs: {}", self.outputs.join(" "))
    }
}
