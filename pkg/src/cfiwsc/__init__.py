"""CFI graphs, multipedes and witnessed symmetric choice at desk scale."""
