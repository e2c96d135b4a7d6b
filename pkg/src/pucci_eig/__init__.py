"""Principal eigenvalues of the Pucci sup-operator on explicit plane domains."""
