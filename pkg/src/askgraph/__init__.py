"""askgraph: question answering over an embedded enterprise property graph.

The package turns natural-language questions into Gremlin-subset scripts via
masked-retrieval in-context examples, validates and repairs the scripts
against the graph schema, executes them on the embedded store, and summarizes
the results. It ships the full evaluation harness (complexity scoring,
syntax-error rate, execution correctness, masking-strategy ablations) and an
HTTP service plus unified CLI.
"""

__version__ = "0.1.0"
