# Discretizers package
