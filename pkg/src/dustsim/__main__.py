from dustsim.cli import main

main()
