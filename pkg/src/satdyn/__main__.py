from satdyn.cli import main

main()
