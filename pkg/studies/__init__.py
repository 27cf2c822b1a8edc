# Studies package
