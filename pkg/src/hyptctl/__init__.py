"""Parameter synthesis for parametric timed automata against nest-free
hyper timed temporal logic with counting and timing predicates."""

__version__ = "0.1.0"
