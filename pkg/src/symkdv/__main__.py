from symkdv.cli import main

main()
